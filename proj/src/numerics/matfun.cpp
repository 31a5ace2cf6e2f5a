#include <algorithm>
#include <cmath>
#include <numbers>

#include "krein/numerics.hpp"

namespace krein {
namespace {

double one_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += std::abs(a(r, c));
    best = std::max(best, s);
  }
  return best;
}

// V f(Lambda) V^dagger for a Hermitian eigendecomposition.
template <class F>
Matrix spectral_apply(const HermitianEig& e, F&& fn) {
  const std::size_t n = e.eigenvalues.size();
  Matrix scaled = e.eigenvectors;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex fk = fn(e.eigenvalues[k]);
    for (std::size_t r = 0; r < n; ++r) scaled(r, k) *= fk;
  }
  return scaled * e.eigenvectors.adjoint();
}

Matrix pade_exp(const Matrix& a) {
  constexpr int kDegree = 6;
  const std::size_t n = a.rows();
  const double norm = one_norm(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = a * Complex(std::ldexp(1.0, -squarings), 0.0);

  Matrix num = Matrix::identity(n);
  Matrix den = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  double coeff = 1.0;
  for (int k = 1; k <= kDegree; ++k) {
    coeff *= static_cast<double>(kDegree - k + 1) / (k * (2.0 * kDegree - k + 1));
    power = power * x;
    num += coeff * power;
    den += ((k % 2) ? -coeff : coeff) * power;
  }
  Matrix r = solve(den, num);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace

Matrix matrix_exp(const Matrix& a) {
  if (!a.is_square()) fail(ErrorCode::DimensionMismatch, "matrix_exp needs a square matrix");
  if (!a.all_finite()) fail(ErrorCode::NonFinite, "matrix_exp input");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const double scale = a.frobenius_norm();
  if (scale == 0.0) return Matrix::identity(n);
  constexpr double kNormalTol = 1e-14;
  if ((a - a.adjoint()).frobenius_norm() <= kNormalTol * scale) {
    const auto e = herm_eig(0.5 * (a + a.adjoint()), 1e-6);
    return spectral_apply(e, [](double x) { return Complex(std::exp(x), 0.0); });
  }
  if ((a + a.adjoint()).frobenius_norm() <= kNormalTol * scale) {
    // A = -i H with H = iA Hermitian.
    const Matrix h = Complex(0.0, 1.0) * a;
    const auto e = herm_eig(0.5 * (h + h.adjoint()), 1e-6);
    return spectral_apply(e, [](double x) { return std::exp(Complex(0.0, -x)); });
  }
  return pade_exp(a);
}

Matrix matrix_exp_metric(const Matrix& q, const Matrix& h) {
  if (!q.is_square() || q.rows() != h.rows() || !h.is_square())
    fail(ErrorCode::DimensionMismatch, "matrix_exp_metric shapes");
  const Matrix l = cholesky(h);
  const Matrix l_adj = l.adjoint();
  const Matrix l_adj_inv = inverse(l_adj);
  Matrix t = l_adj * q * l_adj_inv;
  t = 0.5 * (t + t.adjoint());
  const auto e = herm_eig(t, 1e-6);
  const Matrix et = spectral_apply(e, [](double x) { return Complex(std::exp(x), 0.0); });
  return l_adj_inv * et * l_adj;
}

Matrix matrix_log_posdef_metric(const Matrix& s, const Matrix& h, double tol) {
  if (!s.is_square() || !h.is_square() || s.rows() != h.rows())
    fail(ErrorCode::DimensionMismatch, "matrix_log_posdef_metric shapes");
  if (!s.all_finite() || !h.all_finite()) fail(ErrorCode::NonFinite, "metric log input");
  const double residual = (h * s - s.adjoint() * h).frobenius_norm();
  const double scale = std::max(h.frobenius_norm() * s.frobenius_norm(), 1e-300);
  if (residual > tol * scale)
    fail(ErrorCode::NotMetricSelfAdjoint, "H S != S^dagger H within tolerance");

  const Matrix l = cholesky(h);
  const Matrix l_adj = l.adjoint();
  const Matrix l_adj_inv = inverse(l_adj);
  Matrix t = l_adj * s * l_adj_inv;
  t = 0.5 * (t + t.adjoint());
  const auto e = herm_eig(t, 1e-6);
  const double top = std::max(std::abs(e.eigenvalues.back()), 1e-300);
  if (e.eigenvalues.front() <= std::max(kSpectralFloor * top, kSpectralFloor))
    fail(ErrorCode::NonPositiveSpectrum, "operator has a non-positive eigenvalue");
  const Matrix log_t = spectral_apply(e, [](double x) { return Complex(std::log(x), 0.0); });
  return l_adj_inv * log_t * l_adj;
}

Matrix principal_log(const Matrix& a, double branch_margin) {
  if (!a.is_square()) fail(ErrorCode::DimensionMismatch, "principal_log needs a square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const auto eig = general_eig(a);
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (const auto& lambda : eig.eigenvalues) {
    if (std::abs(lambda) <= 1e-12 * scale)
      fail(ErrorCode::LogBranchAmbiguity, "matrix has a (near) zero eigenvalue");
    if (std::abs(std::arg(lambda)) > std::numbers::pi - branch_margin)
      fail(ErrorCode::LogBranchAmbiguity, "eigenvalue near the negative real axis");
  }

  const Matrix id = Matrix::identity(n);
  Matrix x = a;
  int roots = 0;
  constexpr int kMaxRoots = 60;
  while ((x - id).frobenius_norm() > 0.1 && roots < kMaxRoots) {
    // Denman-Beavers square root iteration.
    Matrix y = x;
    Matrix z = id;
    for (int it = 0; it < 100; ++it) {
      const Matrix y_inv = inverse(y);
      const Matrix z_inv = inverse(z);
      Matrix y_next = 0.5 * (y + z_inv);
      z = 0.5 * (z + y_inv);
      const double change = (y_next - y).frobenius_norm();
      y = std::move(y_next);
      if (change <= 1e-15 * std::max(y.frobenius_norm(), 1.0)) break;
    }
    x = std::move(y);
    ++roots;
  }
  if (roots == kMaxRoots) fail(ErrorCode::NoConvergence, "square root reduction stalled");

  // log(I + E) = sum_{k>=1} (-1)^{k+1} E^k / k, ||E|| <= 0.1.
  const Matrix e = x - id;
  Matrix result(n, n);
  Matrix power = id;
  for (int k = 1; k < 200; ++k) {
    power = power * e;
    const double sign = (k % 2) ? 1.0 : -1.0;
    result += Complex(sign / k, 0.0) * power;
    if (power.frobenius_norm() / k < 1e-18) break;
  }
  return Complex(std::ldexp(1.0, roots), 0.0) * result;
}

}  // namespace krein
