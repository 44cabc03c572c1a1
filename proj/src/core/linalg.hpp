#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/matrix.hpp"

namespace hesselm::linalg {

// Orthogonal similarity a = q · u · qᵀ with u upper Hessenberg. Entries of u
// below the first subdiagonal are exact zeros; for symmetric input u is built
// as an exact symmetric tridiagonal.
struct HessenbergFactors {
  Matrix q;
  Matrix u;
};

HessenbergFactors hessenberg_decompose(const Matrix& a);

// Number of decompositions performed by this process. Lets callers assert
// that factor reuse actually happened.
std::uint64_t hessenberg_decompose_count();

// Symmetric tridiagonal bands extracted from an upper Hessenberg matrix.
struct TridiagonalBands {
  std::vector<double> diag;
  std::vector<double> sub;    // below the diagonal
  std::vector<double> super;  // above the diagonal

  std::size_t size() const { return diag.size(); }

  // y = bands · x
  std::vector<double> apply(std::span<const double> x) const;
};

TridiagonalBands tridiagonal_bands(const Matrix& u);

// Thomas factorization of (bands + shift·I); reusable across right-hand
// sides. Throws SingularityError when a pivot collapses.
class TridiagonalFactor {
public:
  TridiagonalFactor(const TridiagonalBands& bands, double shift);

  std::vector<double> solve(std::span<const double> rhs) const;

  // columnwise solve: rhs has size() rows
  Matrix solve_columns(const Matrix& rhs) const;

private:
  std::vector<double> pivot_;      // modified diagonal
  std::vector<double> inv_pivot_;  // reciprocals, so the sweeps multiply
  std::vector<double> lower_;      // elimination multipliers
  std::vector<double> upper_;      // shifted superdiagonal
};

// Solves (s + lambda·I) x = b through factors of s, reusing q and the
// tridiagonal structure of u. Requires factors of a symmetric matrix.
Matrix shifted_hess_solve(const HessenbergFactors& f, double lambda, const Matrix& b);

// Eigendecomposition of a symmetric positive semidefinite matrix,
// s = vectors · diag(values) · vectorsᵀ, values descending and clamped at 0.
struct EigenFactors {
  Matrix vectors;
  std::vector<double> values;
};

EigenFactors gram_eigendecompose(const Matrix& s);

// Symmetric-elimination (LDLᵀ) solve of a·x = b for symmetric a.
Matrix solve_symmetric(const Matrix& a, const Matrix& b);

// Ridge solution for h (N×L), targets t (N×C):
//   L ≤ N:  (hᵀh + λI)⁻¹ hᵀ t
//   L > N:  hᵀ (hhᵀ + λI)⁻¹ t      (minimum-norm form)
Matrix ridge_solve_direct(const Matrix& h, const Matrix& t, double lambda);

// Minimum-norm form regardless of shape; the baseline the decomposition-based
// trainers are measured against.
Matrix ridge_solve_min_norm(const Matrix& h, const Matrix& t, double lambda);

}  // namespace hesselm::linalg
