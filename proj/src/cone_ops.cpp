#include "krein/cone_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace krein {
namespace {

Vector call_oracle(const PartialOperator& op, std::span<const Complex> v, std::size_t dim) {
  std::optional<Vector> out = op.eval(v);
  if (!out) fail(ErrorCode::NotDefined, "oracle refused a positive input");
  if (out->size() != dim) fail(ErrorCode::DimensionMismatch, "oracle returned wrong length");
  return std::move(*out);
}

Vector axpy(std::span<const Complex> f, Complex c, std::span<const Complex> g) {
  Vector out(f.begin(), f.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * g[i];
  return out;
}

Vector extend_along(const KreinSpace& space, const PartialOperator& op,
                    std::span<const Complex> f, std::span<const Complex> f_plus, double c) {
  const Vector shifted = axpy(f, c, f_plus);
  const Vector w_shifted = call_oracle(op, shifted, space.dim());
  const Vector w_plus = call_oracle(op, f_plus, space.dim());
  return axpy(w_shifted, -c, w_plus);
}

}  // namespace

PartialOperator restrict_to_positive_cone(const KreinSpace& space, Matrix w) {
  if (!w.is_square() || w.rows() != space.dim())
    fail(ErrorCode::DimensionMismatch, "operator shape differs from space");
  return PartialOperator{[space, w = std::move(w)](std::span<const Complex> f) -> std::optional<Vector> {
    if (classify_vector(space, f).kind != VectorKind::Positive) return std::nullopt;
    return w * f;
  }};
}

std::vector<Vector> sample_positive(const KreinSpace& space, std::uint64_t seed,
                                    std::size_t count) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = space.dim();
  const std::size_t max_attempts = 10000 * count;
  // Gaussians in the Gram eigenbasis scaled by |lambda|^{-1/2}: the acceptance
  // rate then depends on the signature only, not on the conditioning.
  const Matrix& frame = space.spectrum().eigenvectors;
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(std::abs(space.spectrum().eigenvalues[i]));
  std::vector<Vector> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (attempts++ >= max_attempts)
      fail(ErrorCode::SamplingExhausted, "rejection sampling found too few positive vectors");
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z[i] = Complex(re, im) * scale[i];
    }
    Vector v = frame * z;
    if (classify_vector(space, v).kind == VectorKind::Positive) out.push_back(std::move(v));
  }
  return out;
}

double shift_coefficient(const KreinSpace& space, std::span<const Complex> f,
                         std::span<const Complex> f_plus) {
  const auto cls = classify_vector(space, f_plus);
  if (cls.kind != VectorKind::Positive) fail(ErrorCode::NotPositive, "f_plus is not positive");
  const double p = cls.value;
  const double cross = std::abs(indefinite_inner(space, f, f_plus));
  const double self = std::abs(indefinite_inner(space, f, f).real());
  return 2.0 * (cross + std::sqrt(cross * cross + p * self) + 1.0) / p;
}

Vector canonical_positive_vector(const KreinSpace& space) {
  const auto& e = space.spectrum();
  return e.eigenvectors.column(space.dim() - 1);
}

ExtensionResult extend_operator(const KreinSpace& space, const PartialOperator& op,
                                std::span<const Complex> f) {
  const std::size_t n = space.dim();
  if (f.size() != n) fail(ErrorCode::DimensionMismatch, "vector length differs from space dimension");

  const Vector f_plus = canonical_positive_vector(space);
  const double c = shift_coefficient(space, f, f_plus);
  Vector result = extend_along(space, op, f, f_plus, c);
  const Vector doubled = extend_along(space, op, f, f_plus, 2.0 * c);

  // Second positive direction: tilt f+ towards the next eigenvector, keeping
  // [f~, f~] >= 3/4 [f+, f+].
  const auto& eig = space.spectrum();
  const double top = eig.eigenvalues[n - 1];
  const double next = eig.eigenvalues[n - 2];
  const double kappa = 0.5 * std::sqrt(top / std::max(std::abs(next), top * 1e-12));
  const Vector tilted = axpy(f_plus, kappa, eig.eigenvectors.column(n - 2));
  const double c_alt = shift_coefficient(space, f, tilted);
  const Vector alternate = extend_along(space, op, f, tilted, c_alt);

  const double spread = std::max({norm2(result - doubled), norm2(result - alternate),
                                  norm2(doubled - alternate)});
  if (spread > space.tol() * (norm2(result) + 1.0))
    fail(ErrorCode::InconsistentOracle, "extension depends on the choice of shift or direction");
  return {std::move(result), spread};
}

ThetaReport theta_of(const KreinSpace& space, const Matrix& w, std::uint64_t seed,
                     std::size_t samples) {
  if (!w.is_square() || w.rows() != space.dim())
    fail(ErrorCode::DimensionMismatch, "operator shape differs from space");
  const std::size_t n = space.dim();
  ThetaReport r;
  const Matrix gain = krein_adjoint(space, w) * w;
  r.theta = gain.trace().real() / static_cast<double>(n);
  const double wnorm2 = std::pow(w.frobenius_norm(), 2);
  r.residual = wnorm2 > 0.0
                   ? (gain - r.theta * Matrix::identity(n)).frobenius_norm() / wnorm2
                   : 1.0;
  try {
    lu_factor(w, 1e-12);
    r.invertible = true;
  } catch (const Error&) {
    r.invertible = false;
  }
  r.is_scaled_unitary = r.invertible && r.theta > 0.0 && r.residual <= space.tol();

  r.sampled_min = std::numeric_limits<double>::infinity();
  r.sampled_max = -std::numeric_limits<double>::infinity();
  for (const auto& f : sample_positive(space, seed, samples)) {
    const Vector wf = w * f;
    const double ratio =
        indefinite_inner(space, wf, wf).real() / indefinite_inner(space, f, f).real();
    r.sampled_min = std::min(r.sampled_min, ratio);
    r.sampled_max = std::max(r.sampled_max, ratio);
  }
  return r;
}

BijectionCertificate positive_bijection_certificate(const KreinSpace& space, const Matrix& w,
                                                    std::uint64_t seed, std::size_t samples) {
  if (!w.is_square() || w.rows() != space.dim())
    fail(ErrorCode::DimensionMismatch, "operator shape differs from space");
  LuFactor lu;
  try {
    lu = lu_factor(w, 1e-12);
  } catch (const Error&) {
    fail(ErrorCode::SingularOperator, "operator is not invertible");
  }
  BijectionCertificate cert;
  cert.theta = theta_of(space, w, seed, samples);
  cert.sampled_cone_preserved = true;
  for (const auto& f : sample_positive(space, seed, samples)) {
    const Vector wf = w * f;
    const Vector winv_f = lu_solve(lu, f);
    if (indefinite_inner(space, wf, wf).real() <= 0.0 ||
        indefinite_inner(space, winv_f, winv_f).real() <= 0.0) {
      cert.sampled_cone_preserved = false;
      break;
    }
  }
  cert.certified = cert.theta.is_scaled_unitary && cert.sampled_cone_preserved;
  cert.checks_agree = cert.theta.is_scaled_unitary == cert.sampled_cone_preserved;
  return cert;
}

bool diagonal_criterion(std::span<const double> moduli, double tol) {
  if (moduli.empty()) fail(ErrorCode::InvalidArgument, "no moduli given");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double m : moduli) {
    if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorCode::NonPositiveModulus, "moduli must be positive");
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi / lo <= 1.0 + tol;
}

}  // namespace krein
