#include "krein/krein_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace krein {
namespace {

Signature count_signature(const std::vector<double>& eigenvalues, double cutoff) {
  Signature s;
  for (double x : eigenvalues) {
    if (x > cutoff) ++s.positive;
    if (x < -cutoff) ++s.negative;
  }
  return s;
}

double spectral_cutoff(const std::vector<double>& eigenvalues, double tol) {
  double top = 0.0;
  for (double x : eigenvalues) top = std::max(top, std::abs(x));
  return tol * top;
}

// Gram-Schmidt in the indefinite product restricted to a definite block.
// `sign` is +1 for a positive block, -1 for a negative one. Runs two passes
// so that round-off in the first does not leak into J.
Matrix orthonormalize_block(const Matrix& gram, const Matrix& basis, int sign, double tol,
                            ErrorCode on_failure) {
  Matrix out = basis;
  const double gscale = std::max(gram.max_abs(), 1e-300);
  for (std::size_t k = 0; k < out.cols(); ++k) {
    Vector v = out.column(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const Vector e = out.column(j);
        // Projection coefficient onto e in the product sign * [.,.].
        const Complex coef = dot(e, gram * std::span<const Complex>(v)) * static_cast<double>(sign);
        for (std::size_t r = 0; r < v.size(); ++r) v[r] -= coef * e[r];
      }
    }
    const double self = sign * dot(v, gram * std::span<const Complex>(v)).real();
    const double nv = norm2(v);
    if (!(self > tol * gscale * nv * nv) || nv == 0.0)
      fail(on_failure, "candidate basis is not definite with the required sign");
    const double s = 1.0 / std::sqrt(self);
    for (auto& z : v) z *= s;
    out.set_column(k, v);
  }
  return out;
}

FundamentalDecomposition assemble(const KreinSpace& space, Matrix plus, Matrix minus) {
  const std::size_t n = space.dim();
  const std::size_t p = plus.cols();
  FundamentalDecomposition d;
  d.gram = space.gram();
  const Matrix b = hstack(plus, minus);
  // J = B S B^{-1}, S = diag(I_p, -I_q).
  Matrix bs = b;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = p; c < n; ++c) bs(r, c) = -bs(r, c);
  const Matrix bt = b.transpose();
  // Solve X B = B S via B^T X^T = (B S)^T.
  d.j = solve(bt, bs.transpose()).transpose();
  d.metric = d.j.adjoint() * space.gram();
  d.metric = 0.5 * (d.metric + d.metric.adjoint());
  d.basis_plus = std::move(plus);
  d.basis_minus = std::move(minus);
  return d;
}

}  // namespace

std::string_view to_string(VectorKind kind) {
  switch (kind) {
    case VectorKind::Positive: return "Positive";
    case VectorKind::Negative: return "Negative";
    case VectorKind::Neutral: return "Neutral";
  }
  return "Unknown";
}

KreinSpace::KreinSpace(Matrix gram, double tol) : gram_(std::move(gram)), tol_(tol) {
  if (!gram_.is_square() || gram_.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "Gram matrix must be square and non-empty");
  if (!gram_.all_finite()) fail(ErrorCode::NonFinite, "Gram matrix");
  if (!(tol_ > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  spectrum_ = herm_eig(gram_, tol_);
  gram_ = 0.5 * (gram_ + gram_.adjoint());
  const double cutoff = spectral_cutoff(spectrum_.eigenvalues, tol_);
  signature_ = count_signature(spectrum_.eigenvalues, cutoff);
  if (signature_.positive + signature_.negative != dim())
    fail(ErrorCode::DegenerateSpace, "Gram matrix is singular; quotient the isotropic part first");
  if (signature_.positive == 0 || signature_.negative == 0)
    fail(ErrorCode::NotIndefinite, "form must take both signs");
  gram_inv_ = inverse(gram_, 1e-300);
}

Complex indefinite_inner(const KreinSpace& space, std::span<const Complex> f,
                         std::span<const Complex> g) {
  if (f.size() != space.dim() || g.size() != space.dim())
    fail(ErrorCode::DimensionMismatch, "vector length differs from space dimension");
  return dot(f, space.gram() * g);
}

VectorClass classify_vector(const KreinSpace& space, std::span<const Complex> f) {
  const double value = indefinite_inner(space, f, f).real();
  const double nf = norm2(f);
  const double band = space.tol() * nf * nf;
  if (value > band) return {VectorKind::Positive, value};
  if (value < -band) return {VectorKind::Negative, value};
  return {VectorKind::Neutral, value};
}

Quotient quotient_degenerate(const Matrix& gram, double tol) {
  if (!gram.is_square() || gram.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "Gram matrix must be square and non-empty");
  const auto eig = herm_eig(gram, tol);
  const double top = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  if (top == 0.0 || top <= tol) fail(ErrorCode::EverythingIsotropic, "form vanishes identically");
  const double cutoff = tol * top;
  const std::size_t n = gram.rows();

  std::vector<std::size_t> kept;
  for (std::size_t k = n; k-- > 0;)
    if (std::abs(eig.eigenvalues[k]) > cutoff) kept.push_back(k);  // descending eigenvalue

  const Signature sig = count_signature(eig.eigenvalues, cutoff);
  if (sig.positive == 0 || sig.negative == 0)
    fail(ErrorCode::NotIndefinite, "quotient is definite");

  if (kept.size() == n) return {KreinSpace(gram, tol), Matrix::identity(n)};

  Matrix projection(kept.size(), n);
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t c = 0; c < n; ++c)
      projection(i, c) = std::conj(eig.eigenvectors(c, kept[i]));
  std::vector<double> diag;
  for (std::size_t k : kept) diag.push_back(eig.eigenvalues[k]);
  return {KreinSpace(Matrix::diagonal(std::span<const double>(diag)), tol), projection};
}

Matrix FundamentalDecomposition::projector_plus() const {
  return 0.5 * (Matrix::identity(dim()) + j);
}

Matrix FundamentalDecomposition::projector_minus() const {
  return 0.5 * (Matrix::identity(dim()) - j);
}

Matrix gram_block(const Matrix& gram, const Matrix& a, const Matrix& b) {
  return a.adjoint() * gram * b;
}

FundamentalDecomposition fundamental_decomposition(const KreinSpace& space) {
  const auto& eig = space.spectrum();
  const std::size_t n = space.dim();
  const auto sig = space.signature();
  Matrix plus(n, sig.positive);
  Matrix minus(n, sig.negative);
  // Positive eigenvalues in descending order, negative ones ascending.
  for (std::size_t i = 0; i < sig.positive; ++i) {
    const std::size_t k = n - 1 - i;
    const double s = 1.0 / std::sqrt(eig.eigenvalues[k]);
    for (std::size_t r = 0; r < n; ++r) plus(r, i) = eig.eigenvectors(r, k) * s;
  }
  for (std::size_t i = 0; i < sig.negative; ++i) {
    const double s = 1.0 / std::sqrt(-eig.eigenvalues[i]);
    for (std::size_t r = 0; r < n; ++r) minus(r, i) = eig.eigenvectors(r, i) * s;
  }
  return assemble(space, std::move(plus), std::move(minus));
}

FundamentalDecomposition decomposition_from_bases(const KreinSpace& space,
                                                  const Matrix& basis_plus,
                                                  const Matrix& basis_minus) {
  const std::size_t n = space.dim();
  if (basis_plus.rows() != n || basis_minus.rows() != n ||
      basis_plus.cols() + basis_minus.cols() != n || basis_plus.cols() == 0 ||
      basis_minus.cols() == 0)
    fail(ErrorCode::WrongDimensions, "bases must have dim rows and dim columns in total");

  const Matrix& g = space.gram();
  // Definiteness of each Gram block.
  const auto check_block = [&](const Matrix& basis, int sign, ErrorCode code) {
    Matrix block = gram_block(g, basis, basis) * Complex(sign, 0.0);
    block = 0.5 * (block + block.adjoint());
    const auto e = herm_eig(block, 1e-6);
    const Matrix bb = basis.adjoint() * basis;
    const auto eb = herm_eig(0.5 * (bb + bb.adjoint()), 1e-6);
    const double scale = std::max(g.max_abs(), 1e-300) * std::max(eb.eigenvalues.back(), 1e-300);
    if (!(e.eigenvalues.front() > space.tol() * scale))
      fail(code, "Gram block of the candidate basis is not definite");
  };
  check_block(basis_plus, +1, ErrorCode::NotPositiveSubspace);
  check_block(basis_minus, -1, ErrorCode::NotNegativeSubspace);

  Matrix plus = orthonormalize_block(g, basis_plus, +1, space.tol(), ErrorCode::NotPositiveSubspace);
  Matrix minus = orthonormalize_block(g, basis_minus, -1, space.tol(), ErrorCode::NotNegativeSubspace);

  const Matrix cross = gram_block(g, plus, minus);
  const double gscale = std::max(spectral_norm(g), 1e-300);
  for (std::size_t i = 0; i < plus.cols(); ++i) {
    const double ni = norm2(plus.column(i));
    for (std::size_t k = 0; k < minus.cols(); ++k) {
      const double nk = norm2(minus.column(k));
      if (std::abs(cross(i, k)) > space.tol() * gscale * ni * nk)
        fail(ErrorCode::NotOrthogonal, "positive and negative bases are not [.,.]-orthogonal");
    }
  }
  return assemble(space, std::move(plus), std::move(minus));
}

DecompositionAudit audit(const FundamentalDecomposition& d) {
  DecompositionAudit a{};
  const std::size_t n = d.dim();
  a.involution = (d.j * d.j - Matrix::identity(n)).frobenius_norm();
  a.self_adjoint = (d.gram * d.j - d.j.adjoint() * d.gram).frobenius_norm() /
                   std::max(d.gram.frobenius_norm(), 1e-300);
  a.cross_orthogonal = gram_block(d.gram, d.basis_plus, d.basis_minus).max_abs();
  a.metric_min_eig = herm_eig(d.metric, 1e-6).eigenvalues.front();
  return a;
}

Complex definite_inner(const FundamentalDecomposition& decomp, std::span<const Complex> f,
                       std::span<const Complex> g) {
  if (f.size() != decomp.dim() || g.size() != decomp.dim())
    fail(ErrorCode::DimensionMismatch, "vector length differs from space dimension");
  const Vector jf = decomp.j * f;
  return dot(jf, decomp.gram * g);
}

Matrix krein_adjoint(const KreinSpace& space, const Matrix& w) {
  if (!w.is_square() || w.rows() != space.dim())
    fail(ErrorCode::DimensionMismatch, "operator shape differs from space");
  return space.gram_inverse() * w.adjoint() * space.gram();
}

}  // namespace krein
