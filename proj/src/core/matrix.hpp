#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hesselm {

// Dense row-major matrix of doubles; the single carrier type used by the
// numeric kernels.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const double& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

// aᵀ · b without forming the transpose
Matrix multiply_at_b(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// hᵀh and hhᵀ, formed symmetrically (upper triangle computed, mirrored)
Matrix gram_columns(const Matrix& h);
Matrix gram_rows(const Matrix& h);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

}  // namespace hesselm
