#include "core/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace hesselm::linalg {

namespace {

std::atomic<std::uint64_t> g_hessenberg_count{0};

constexpr double kTridiagPivotTol = 1e-14;   // relative to the largest band entry
constexpr double kSymPivotTol = 1e-14;       // relative to the largest initial diagonal
constexpr double kSymmetryTol = 1e-10;       // absolute, for eigendecomposition input
constexpr int kJacobiMaxSweeps = 100;

bool is_symmetric(const Matrix& a, double tol) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::fabs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

struct Reflector {
  std::vector<double> v;  // acts on rows/cols k+1..n-1
  double beta = 0.0;      // P = I - beta·v·vᵀ
};

// Householder vector for x: P x = tau·e1. Chooses the sign that avoids
// cancellation.
Reflector make_reflector(std::span<const double> x, double& tau) {
  Reflector r;
  r.v.assign(x.begin(), x.end());
  double sigma = 0.0;
  for (double v : x) sigma += v * v;
  sigma = std::sqrt(sigma);
  if (sigma == 0.0) {
    tau = 0.0;
    return r;  // beta = 0: identity reflector
  }
  double x0 = x[0];
  tau = x0 >= 0.0 ? -sigma : sigma;
  r.v[0] = x0 - tau;
  double vtv = 0.0;
  for (double v : r.v) vtv += v * v;
  r.beta = 2.0 / vtv;
  return r;
}

// Backward accumulation of Q = P0·P1·…·Pm applied to the identity. Reflector
// k only touches rows k+1..n-1, and at step k the live block of Q is the
// trailing (n-k-1)² square.
Matrix accumulate_q(std::size_t n, const std::vector<Reflector>& reflectors) {
  Matrix q = Matrix::identity(n);
  for (std::size_t step = reflectors.size(); step-- > 0;) {
    const Reflector& r = reflectors[step];
    if (r.beta == 0.0) continue;
    std::size_t base = step + 1;
    std::size_t len = n - base;
    std::vector<double> s(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double* row = &q(base + i, base);
      double vi = r.v[i];
      for (std::size_t j = 0; j < len; ++j) s[j] += vi * row[j];
    }
    for (std::size_t i = 0; i < len; ++i) {
      double* row = &q(base + i, base);
      double f = r.beta * r.v[i];
      for (std::size_t j = 0; j < len; ++j) row[j] -= f * s[j];
    }
  }
  return q;
}

// Householder reduction of a general square matrix to upper Hessenberg form.
HessenbergFactors decompose_general(Matrix a) {
  std::size_t n = a.rows();
  std::vector<Reflector> reflectors;
  reflectors.reserve(n > 2 ? n - 2 : 0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::size_t base = k + 1;
    std::size_t len = n - base;
    std::vector<double> x(len);
    for (std::size_t i = 0; i < len; ++i) x[i] = a(base + i, k);
    double tau = 0.0;
    Reflector r = make_reflector(x, tau);
    if (r.beta != 0.0) {
      // left: rows base.., cols k..
      std::vector<double> s(n - k, 0.0);
      for (std::size_t i = 0; i < len; ++i) {
        const double* row = &a(base + i, k);
        double vi = r.v[i];
        for (std::size_t j = 0; j < n - k; ++j) s[j] += vi * row[j];
      }
      for (std::size_t i = 0; i < len; ++i) {
        double* row = &a(base + i, k);
        double f = r.beta * r.v[i];
        for (std::size_t j = 0; j < n - k; ++j) row[j] -= f * s[j];
      }
      // right: all rows, cols base..
      for (std::size_t i = 0; i < n; ++i) {
        double* row = &a(i, base);
        double dot = 0.0;
        for (std::size_t j = 0; j < len; ++j) dot += row[j] * r.v[j];
        double f = r.beta * dot;
        for (std::size_t j = 0; j < len; ++j) row[j] -= f * r.v[j];
      }
      a(base, k) = tau;
    }
    for (std::size_t i = base + 1; i < n; ++i) a(i, k) = 0.0;
    reflectors.push_back(std::move(r));
  }
  return {accumulate_q(n, reflectors), std::move(a)};
}

// Symmetric variant: the same reflector sequence applied through rank-2
// updates of the trailing block, producing an exact tridiagonal u.
HessenbergFactors decompose_symmetric(Matrix a) {
  std::size_t n = a.rows();
  std::vector<double> diag(n), sub(n > 0 ? n - 1 : 0);
  std::vector<Reflector> reflectors;
  reflectors.reserve(n > 2 ? n - 2 : 0);
  std::vector<double> p, w;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::size_t base = k + 1;
    std::size_t len = n - base;
    std::vector<double> x(len);
    for (std::size_t i = 0; i < len; ++i) x[i] = a(base + i, k);
    double tau = 0.0;
    Reflector r = make_reflector(x, tau);
    sub[k] = r.beta == 0.0 ? a(base, k) : tau;
    if (r.beta != 0.0) {
      p.assign(len, 0.0);
      for (std::size_t i = 0; i < len; ++i) {
        const double* row = &a(base + i, base);
        double acc = 0.0;
        for (std::size_t j = 0; j < len; ++j) acc += row[j] * r.v[j];
        p[i] = r.beta * acc;
      }
      double pv = 0.0;
      for (std::size_t i = 0; i < len; ++i) pv += p[i] * r.v[i];
      double gamma = 0.5 * r.beta * pv;
      w.assign(len, 0.0);
      for (std::size_t i = 0; i < len; ++i) w[i] = p[i] - gamma * r.v[i];
      for (std::size_t i = 0; i < len; ++i) {
        double* row = &a(base + i, base);
        double vi = r.v[i], wi = w[i];
        for (std::size_t j = 0; j < len; ++j) row[j] -= vi * w[j] + wi * r.v[j];
      }
    }
    reflectors.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  if (n >= 2) sub[n - 2] = a(n - 1, n - 2);

  Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    u(i, i) = diag[i];
    if (i + 1 < n) {
      u(i + 1, i) = sub[i];
      u(i, i + 1) = sub[i];
    }
  }
  return {accumulate_q(n, reflectors), std::move(u)};
}

}  // namespace

HessenbergFactors hessenberg_decompose(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("hessenberg_decompose: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  if (!a.all_finite()) {
    throw ValidationError("hessenberg_decompose: input contains non-finite entries");
  }
  g_hessenberg_count.fetch_add(1, std::memory_order_relaxed);
  std::size_t n = a.rows();
  if (n <= 2) {
    return {Matrix::identity(n), a};  // already upper Hessenberg
  }
  double scale = max_abs(a);
  if (is_symmetric(a, 1e-13 * (scale > 0.0 ? scale : 1.0))) {
    return decompose_symmetric(a);
  }
  return decompose_general(a);
}

std::uint64_t hessenberg_decompose_count() {
  return g_hessenberg_count.load(std::memory_order_relaxed);
}

std::vector<double> TridiagonalBands::apply(std::span<const double> x) const {
  std::size_t n = diag.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += sub[i - 1] * x[i - 1];
    if (i + 1 < n) s += super[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

TridiagonalBands tridiagonal_bands(const Matrix& u) {
  if (u.rows() != u.cols()) throw DimensionError("tridiagonal_bands: matrix not square");
  std::size_t n = u.rows();
  TridiagonalBands b;
  b.diag.resize(n);
  b.sub.resize(n > 0 ? n - 1 : 0);
  b.super.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    b.diag[i] = u(i, i);
    if (i + 1 < n) {
      b.sub[i] = u(i + 1, i);
      b.super[i] = u(i, i + 1);
    }
  }
  return b;
}

TridiagonalFactor::TridiagonalFactor(const TridiagonalBands& bands, double shift) {
  std::size_t n = bands.size();
  pivot_.resize(n);
  inv_pivot_.resize(n);
  lower_.assign(n, 0.0);
  upper_.assign(n, 0.0);
  double band_max = 0.0;
  for (double v : bands.diag) band_max = std::max(band_max, std::fabs(v));
  for (double v : bands.sub) band_max = std::max(band_max, std::fabs(v));
  for (double v : bands.super) band_max = std::max(band_max, std::fabs(v));
  band_max = std::max(band_max, std::fabs(shift));
  double tol = kTridiagPivotTol * (band_max > 0.0 ? band_max : 1.0);

  for (std::size_t i = 0; i + 1 < n; ++i) upper_[i] = bands.super[i];
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = bands.diag[i] + shift;
    if (i > 0) {
      double m = bands.sub[i - 1] / prev;
      lower_[i] = m;
      d -= m * upper_[i - 1];
    }
    if (std::fabs(d) < tol) {
      throw SingularityError("tridiagonal solve: pivot " + std::to_string(d) + " at index " +
                             std::to_string(i) + " is numerically singular; increase lambda");
    }
    pivot_[i] = d;
    inv_pivot_[i] = 1.0 / d;
    prev = d;
  }
}

std::vector<double> TridiagonalFactor::solve(std::span<const double> rhs) const {
  std::size_t n = pivot_.size();
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t i = 1; i < n; ++i) x[i] -= lower_[i] * x[i - 1];
  x[n - 1] *= inv_pivot_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - upper_[i] * x[i + 1]) * inv_pivot_[i];
  return x;
}

Matrix TridiagonalFactor::solve_columns(const Matrix& rhs) const {
  std::size_t n = pivot_.size();
  if (rhs.rows() != n) throw DimensionError("tridiagonal solve: right-hand side rows differ");
  std::size_t c = rhs.cols();
  Matrix x = rhs;
  for (std::size_t i = 1; i < n; ++i) {
    double m = lower_[i];
    double* xi = &x(i, 0);
    const double* xp = &x(i - 1, 0);
    for (std::size_t j = 0; j < c; ++j) xi[j] -= m * xp[j];
  }
  {
    double r = inv_pivot_[n - 1];
    double* xn = &x(n - 1, 0);
    for (std::size_t j = 0; j < c; ++j) xn[j] *= r;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    double u = upper_[i], r = inv_pivot_[i];
    double* xi = &x(i, 0);
    const double* xs = &x(i + 1, 0);
    for (std::size_t j = 0; j < c; ++j) xi[j] = (xi[j] - u * xs[j]) * r;
  }
  return x;
}

Matrix shifted_hess_solve(const HessenbergFactors& f, double lambda, const Matrix& b) {
  if (lambda < 0.0) throw ValidationError("shifted_hess_solve: lambda must be nonnegative");
  if (b.rows() != f.q.rows()) {
    throw DimensionError("shifted_hess_solve: right-hand side has " + std::to_string(b.rows()) +
                         " rows, factors expect " + std::to_string(f.q.rows()));
  }
  TridiagonalFactor factor(tridiagonal_bands(f.u), lambda);
  Matrix z = multiply_at_b(f.q, b);
  return multiply(f.q, factor.solve_columns(z));
}

EigenFactors gram_eigendecompose(const Matrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("gram_eigendecompose: matrix not square");
  if (!is_symmetric(s, kSymmetryTol)) {
    throw ValidationError("gram_eigendecompose: input is not symmetric within 1e-10");
  }
  std::size_t n = s.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));

  Matrix v = Matrix::identity(n);
  double eps = 1e-12 * frobenius_norm(a);

  auto max_off = [&]() {
    double m = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) m = std::max(m, std::fabs(a(p, q)));
    return m;
  };

  bool converged = n < 2 || max_off() <= eps;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) <= eps) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
    converged = max_off() <= eps;
  }
  if (!converged) {
    throw ConvergenceError("gram_eigendecompose: off-diagonal norm " + std::to_string(max_off()) +
                           " after " + std::to_string(kJacobiMaxSweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenFactors out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double val = a(order[j], order[j]);
    out.values[j] = val < 0.0 ? 0.0 : val;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

Matrix solve_symmetric(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw DimensionError("solve_symmetric: matrix not square");
  if (b.rows() != a.rows()) throw DimensionError("solve_symmetric: right-hand side rows differ");
  std::size_t n = a.rows();
  Matrix l = a;  // holds L below the diagonal, D on it
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
  double tol = kSymPivotTol * (scale > 0.0 ? scale : 1.0);

  for (std::size_t j = 0; j < n; ++j) {
    double d = l(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k) * l(k, k);
    if (std::fabs(d) < tol) {
      throw SingularityError("solve_symmetric: pivot " + std::to_string(d) + " at column " +
                             std::to_string(j) + "; the system is numerically singular");
    }
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = l(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k) * l(k, k);
      l(i, j) = s / d;
    }
  }

  Matrix x = b;
  std::size_t c = x.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = &x(i, 0);
    for (std::size_t k = 0; k < i; ++k) {
      double lik = l(i, k);
      const double* xk = &x(k, 0);
      for (std::size_t j = 0; j < c; ++j) xi[j] -= lik * xk[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double d = l(i, i);
    double* xi = &x(i, 0);
    for (std::size_t j = 0; j < c; ++j) xi[j] /= d;
  }
  for (std::size_t i = n; i-- > 0;) {
    double* xi = &x(i, 0);
    for (std::size_t k = i + 1; k < n; ++k) {
      double lki = l(k, i);
      const double* xk = &x(k, 0);
      for (std::size_t j = 0; j < c; ++j) xi[j] -= lki * xk[j];
    }
  }
  return x;
}

Matrix ridge_solve_direct(const Matrix& h, const Matrix& t, double lambda) {
  if (lambda < 0.0) throw ValidationError("ridge: lambda must be nonnegative");
  if (h.rows() != t.rows()) {
    throw DimensionError("ridge: design has " + std::to_string(h.rows()) + " rows, targets " +
                         std::to_string(t.rows()));
  }
  if (h.cols() > h.rows()) return ridge_solve_min_norm(h, t, lambda);
  Matrix g = gram_columns(h);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
  return solve_symmetric(g, multiply_at_b(h, t));
}

Matrix ridge_solve_min_norm(const Matrix& h, const Matrix& t, double lambda) {
  if (lambda < 0.0) throw ValidationError("ridge: lambda must be nonnegative");
  if (h.rows() != t.rows()) {
    throw DimensionError("ridge: design has " + std::to_string(h.rows()) + " rows, targets " +
                         std::to_string(t.rows()));
  }
  Matrix g = gram_rows(h);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
  return multiply_at_b(h, solve_symmetric(g, t));
}

}  // namespace hesselm::linalg
