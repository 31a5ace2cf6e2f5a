#include <algorithm>
#include <cmath>

#include "krein/numerics.hpp"

namespace krein {

LuFactor lu_factor(const Matrix& a, double tol) {
  if (!a.is_square()) fail(ErrorCode::DimensionMismatch, "LU needs a square matrix");
  if (!a.all_finite()) fail(ErrorCode::NonFinite, "LU input");
  const std::size_t n = a.rows();
  LuFactor f{a, std::vector<std::size_t>(n)};
  Matrix& lu = f.lu;
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > best) {
        best = std::abs(lu(i, k));
        piv = i;
      }
    }
    if (best <= tol * scale) fail(ErrorCode::Singular, "pivot below tolerance");
    f.pivots[k] = piv;
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
    const Complex inv = 1.0 / lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex m = lu(i, k) * inv;
      lu(i, k) = m;
      if (m == Complex{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
    }
  }
  return f;
}

Vector lu_solve(const LuFactor& f, std::span<const Complex> b) {
  const std::size_t n = f.lu.rows();
  if (b.size() != n) fail(ErrorCode::DimensionMismatch, "right-hand side length");
  Vector x(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k)
    if (f.pivots[k] != k) std::swap(x[k], x[f.pivots[k]]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

Matrix lu_solve(const LuFactor& f, const Matrix& b) {
  Matrix x(b.rows(), b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) x.set_column(c, lu_solve(f, b.column(c)));
  return x;
}

Vector solve(const Matrix& a, std::span<const Complex> b, double tol) {
  return lu_solve(lu_factor(a, tol), b);
}

Matrix solve(const Matrix& a, const Matrix& b, double tol) {
  return lu_solve(lu_factor(a, tol), b);
}

Matrix inverse(const Matrix& a, double tol) {
  return lu_solve(lu_factor(a, tol), Matrix::identity(a.rows()));
}

Matrix cholesky(const Matrix& h) {
  if (!h.is_square()) fail(ErrorCode::DimensionMismatch, "Cholesky needs a square matrix");
  const std::size_t n = h.rows();
  if (hermitian_residual(h) > 1e-8) fail(ErrorCode::NotHermitian, "Cholesky input");
  Matrix l(n, n);
  const double floor = kSpectralFloor * std::max(h.max_abs(), 1e-300);
  for (std::size_t j = 0; j < n; ++j) {
    double d = h(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > floor)) fail(ErrorCode::NotPositiveDefinite, "metric is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace krein
