#include "krein/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace krein {
namespace {

constexpr std::array<double, 6> kTestTimes = {-1.0, -0.5, 0.3, 0.5, 1.0, 1.7};
constexpr double kGroupTol = 1e-8;
constexpr double kDiagonalizableCondition = 1e8;

Matrix diag_exp(const Vector& lambdas, double t, double shift) {
  Vector d(lambdas.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp((lambdas[i] - shift) * t);
  return Matrix::diagonal(std::span<const Complex>(d));
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

SemigroupSpec SemigroupSpec::diagonal(Matrix basis, Vector lambdas) {
  if (!basis.is_square() || basis.rows() != lambdas.size() || lambdas.empty())
    fail(ErrorCode::DimensionMismatch, "diagonal spec needs an n x n basis and n exponents");
  for (const auto& l : lambdas)
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag()))
      fail(ErrorCode::NonFinite, "exponents must be finite");
  lu_factor(basis);
  return SemigroupSpec(DiagonalForm{std::move(basis), std::move(lambdas)});
}

SemigroupSpec SemigroupSpec::from_generator(Matrix generator) {
  if (!generator.is_square() || generator.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "generator must be square");
  if (!generator.all_finite()) fail(ErrorCode::NonFinite, "generator");
  return SemigroupSpec(GeneratorForm{std::move(generator)});
}

std::size_t SemigroupSpec::dim() const {
  return is_diagonal() ? diagonal_form().basis.rows() : generator_form().generator.rows();
}

Matrix SemigroupSpec::generator_matrix() const {
  if (!is_diagonal()) return generator_form().generator;
  const auto& d = diagonal_form();
  const Matrix scaled = d.basis * Matrix::diagonal(std::span<const Complex>(d.lambdas));
  return solve(d.basis.transpose(), scaled.transpose()).transpose();
}

Matrix SemigroupSpec::exp_shifted(double t, double shift) const {
  if (is_diagonal()) {
    const auto& d = diagonal_form();
    const Matrix scaled = d.basis * diag_exp(d.lambdas, t, shift);
    // scaled * basis^{-1}
    return solve(d.basis.transpose(), scaled.transpose()).transpose();
  }
  Matrix a = generator_form().generator;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) -= shift;
  return matrix_exp(Complex(t, 0.0) * a);
}

void validate_spec(const KreinSpace& space, const SemigroupSpec& spec) {
  if (spec.dim() != space.dim()) fail(ErrorCode::DimensionMismatch, "spec and space dimensions differ");
  if (!spec.is_diagonal()) return;
  const Matrix& b = spec.diagonal_form().basis;
  const Matrix g = gram_block(space.gram(), b, b);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(std::abs(g(i, j)) - expected) > 1e3 * space.tol())
        fail(ErrorCode::NotOrthogonal, "diagonal basis is not [.,.]-orthonormal");
    }
}

Matrix evolve(const SemigroupSpec& spec, double t) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "a semigroup is only defined for t >= 0");
  if (t == 0.0) return Matrix::identity(spec.dim());
  return spec.exp_shifted(t, 0.0);
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(0.1 * k);
  return grid;
}

ExponentialFit fit_exponential_law(std::span<const double> t, std::span<const double> theta) {
  if (t.size() != theta.size() || t.empty())
    fail(ErrorCode::DimensionMismatch, "need matching, non-empty time and theta samples");
  std::vector<double> logs(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0)) fail(ErrorCode::NotPositiveBijection, "theta must be positive");
    logs[i] = std::log(theta[i]);
  }
  ExponentialFit fit{least_squares_slope(t, logs), 0.0};
  for (std::size_t i = 0; i < t.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(logs[i] - fit.alpha * t[i]));
  return fit;
}

double fit_alpha(const KreinSpace& space, const SemigroupSpec& spec,
                 std::span<const double> t_grid, std::uint64_t seed) {
  validate_spec(space, spec);
  std::vector<double> thetas;
  double max_log = 0.0;
  for (double t : t_grid) {
    const Matrix w = evolve(spec, t);
    const auto cert = positive_bijection_certificate(space, w, seed);
    if (!cert.certified)
      fail(ErrorCode::NotPositiveBijection,
           "W(" + std::to_string(t) + ") is not a bijection of the positive cone");
    thetas.push_back(cert.theta.theta);
    max_log = std::max(max_log, std::abs(std::log(cert.theta.theta)));
  }
  const auto fit = fit_exponential_law(t_grid, thetas);
  if (fit.residual > space.tol() * (1.0 + max_log))
    fail(ErrorCode::ExponentialLawViolation, "ln theta(t) is not linear in t");
  return fit.alpha;
}

Matrix Group::generator_matrix() const {
  Matrix a = spec_.generator_matrix();
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) -= 0.5 * alpha_;
  return a;
}

double group_unitarity_residual(const KreinSpace& space, const Group& group) {
  const Matrix& g = space.gram();
  const double gnorm = g.frobenius_norm();
  double worst = 0.0;
  for (double t : kTestTimes) {
    const Matrix u = group.at(t);
    const double unorm = u.frobenius_norm();
    const double r = (u.adjoint() * g * u - g).frobenius_norm() / (unorm * unorm * gnorm);
    worst = std::max(worst, r);
  }
  return worst;
}

Group normalize_to_group(const KreinSpace& space, const SemigroupSpec& spec, double alpha) {
  validate_spec(space, spec);
  Group group(spec, alpha);
  const double r = group_unitarity_residual(space, group);
  if (!(r <= kGroupTol))
    fail(ErrorCode::UnitarityResidual, "normalized group does not preserve [.,.]");
  return group;
}

Matrix evolved_symmetry(const FundamentalDecomposition& decomp, const Group& group, double t) {
  if (decomp.dim() != group.dim()) fail(ErrorCode::DimensionMismatch, "decomposition and group differ");
  const Matrix u = group.at(t);
  const Matrix uj = u * decomp.j;
  // U J U^{-1} = (U^{-T} (U J)^T)^T
  return solve(u.transpose(), uj.transpose()).transpose();
}

FundamentalDecomposition evolved_decomposition(const KreinSpace& space,
                                               const FundamentalDecomposition& decomp,
                                               const Group& group, double t) {
  const Matrix u = group.at(t);
  return decomposition_from_bases(space, u * decomp.basis_plus, u * decomp.basis_minus);
}

namespace {

QOperator q_from_symmetries(const Matrix& metric_l, const Matrix& j_l, const Matrix& j_m) {
  const Matrix s = j_l * j_m;
  QOperator out;
  out.q = matrix_log_posdef_metric(s, metric_l, 1e-7);
  const Matrix eq = matrix_exp_metric(out.q, metric_l);
  const Matrix emq = matrix_exp_metric(-out.q, metric_l);
  out.exp_residual = (eq - s).frobenius_norm() / std::max(1.0, s.frobenius_norm());
  const Matrix s_inv = j_m * j_l;
  out.inverse_residual = (emq - s_inv).frobenius_norm() / std::max(1.0, s_inv.frobenius_norm());
  out.anticommutation_residual =
      (j_l * out.q + out.q * j_l).frobenius_norm() / std::max(1.0, out.q.frobenius_norm());
  return out;
}

}  // namespace

QOperator q_operator(const FundamentalDecomposition& decomp_l,
                     const FundamentalDecomposition& decomp_m) {
  if (decomp_l.dim() != decomp_m.dim() || rel_diff(decomp_l.gram, decomp_m.gram) > 1e-12)
    fail(ErrorCode::DimensionMismatch, "decompositions belong to different spaces");
  return q_from_symmetries(decomp_l.metric, decomp_l.j, decomp_m.j);
}

UnitaryFactorization factorize_unitary(const KreinSpace& space,
                                       const FundamentalDecomposition& decomp,
                                       const Group& group, double t) {
  const Matrix u = group.at(t);
  const Matrix& h = decomp.metric;
  const std::size_t n = u.rows();

  // e^{-Q_t} = J J_t J = U U^{*H}, so e^{-Q_t/2} Y_t is the polar
  // decomposition of U in <.,.>_L. Taking it from an SVD of U avoids the
  // log of J J_t, whose condition number is the square of U's.
  const Matrix l = cholesky(h);
  const Matrix l_adj = l.adjoint();
  const Matrix l_adj_inv = inverse(l_adj);
  const auto s = svd(l_adj * u * l_adj_inv);
  std::vector<double> log_sigma(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(s.values[k] > 0.0)) fail(ErrorCode::SingularOperator, "U(t) is not invertible");
    log_sigma[k] = -2.0 * std::log(s.values[k]);
  }
  const Matrix q_std = s.left * Matrix::diagonal(std::span<const double>(log_sigma)) * s.left.adjoint();
  const Matrix y_std = s.left * s.right.adjoint();

  UnitaryFactorization out;
  out.q_t = l_adj_inv * (0.5 * (q_std + q_std.adjoint())) * l_adj;
  out.y_t = l_adj_inv * y_std * l_adj;
  out.q_anticommutation_residual = (decomp.j * out.q_t + out.q_t * decomp.j).frobenius_norm() /
                                   std::max(1.0, out.q_t.frobenius_norm());
  const Matrix j_t = evolved_symmetry(decomp, group, t);
  const Matrix jj = decomp.j * j_t;
  out.exp_residual = (matrix_exp_metric(out.q_t, h) - jj).frobenius_norm() / std::max(1.0, jj.frobenius_norm());

  const Matrix rebuilt = matrix_exp_metric(-0.5 * out.q_t, h) * out.y_t;
  out.reconstruction_residual = (rebuilt - u).frobenius_norm() / std::max(1.0, u.frobenius_norm());
  const Matrix y_inv = inverse(out.y_t);
  out.unitarity_residual =
      (h * y_inv - out.y_t.adjoint() * h).frobenius_norm() / std::max(1e-300, h.frobenius_norm());
  out.commutation_residual = (decomp.j * out.y_t - out.y_t * decomp.j).frobenius_norm();

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  out.norm_identity_residual = 0.0;
  for (int k = 0; k < 8; ++k) {
    Vector f(space.dim());
    for (auto& z : f) z = Complex(normal(rng), normal(rng));
    const Vector yf = out.y_t * std::span<const Complex>(f);
    const double nf = std::sqrt(dot(f, h * std::span<const Complex>(f)).real());
    const double nyf = std::sqrt(dot(yf, h * std::span<const Complex>(yf)).real());
    out.norm_identity_residual = std::max(out.norm_identity_residual, std::abs(nyf - nf) / nf);
  }
  return out;
}

FlowReport uniform_bound_scan(const KreinSpace& space, const FundamentalDecomposition& decomp,
                              const Group& group, std::span<const double> t_grid,
                              std::optional<double> bound_c) {
  FlowReport report;
  const Matrix& g = space.gram();
  const double gnorm = g.frobenius_norm();
  const double base_norm = metric_operator_norm(decomp.j, decomp.metric);
  report.bound_c = bound_c.value_or(10.0 * base_norm);

  std::vector<double> abs_t;
  std::vector<double> log_norm;
  for (double t : t_grid) {
    FlowRow row{};
    row.t = t;
    const Matrix j_t = evolved_symmetry(decomp, group, t);
    row.jt_norm = metric_operator_norm(j_t, decomp.metric);
    const Matrix u = group.at(t);
    const double unorm = u.frobenius_norm();
    row.unitarity_residual = (u.adjoint() * g * u - g).frobenius_norm() / (unorm * unorm * gnorm);
    try {
      const auto f = factorize_unitary(space, decomp, group, t);
      row.q_anticomm_residual = f.q_anticommutation_residual;
      row.factorization_residual = std::max(f.reconstruction_residual, f.unitarity_residual);
    } catch (const Error&) {
      // Left empty: the factorization is undefined at this t.
    }
    report.max_norm = std::max(report.max_norm, row.jt_norm);
    abs_t.push_back(std::abs(t));
    log_norm.push_back(std::log(row.jt_norm / base_norm));
    report.rows.push_back(row);
  }
  report.uniformly_bounded = report.max_norm <= report.bound_c;
  report.growth_rate = least_squares_slope(abs_t, log_norm);
  return report;
}

namespace {

// Orthonormal basis of ker(A - mu I), found from the small eigenvalues of
// (A - mu I)^dagger (A - mu I).
Matrix eigenspace(const Matrix& a, Complex mu, double scale) {
  Matrix shifted = a;
  for (std::size_t i = 0; i < a.rows(); ++i) shifted(i, i) -= mu;
  Matrix normal = shifted.adjoint() * shifted;
  normal = 0.5 * (normal + normal.adjoint());
  const auto e = herm_eig(normal, 1e-6);
  const double cutoff = std::pow(1e-7 * scale, 2);
  std::size_t count = 0;
  while (count < e.eigenvalues.size() && e.eigenvalues[count] <= cutoff) ++count;
  return e.eigenvectors.columns(0, count);
}

}  // namespace

FundamentalDecomposition invariant_decomposition(const KreinSpace& space, const Group& group) {
  if (group.dim() != space.dim()) fail(ErrorCode::DimensionMismatch, "group and space differ");
  const Matrix& g = space.gram();
  const std::size_t n = space.dim();
  std::vector<Vector> plus;
  std::vector<Vector> minus;

  if (group.spec().is_diagonal()) {
    // The basis is an exact eigenbasis with |[f_n, f_n]| = 1.
    const Matrix& b = group.spec().diagonal_form().basis;
    for (std::size_t k = 0; k < n; ++k) {
      const Vector v = b.column(k);
      const auto cls = classify_vector(space, v);
      if (cls.kind == VectorKind::Neutral) fail(ErrorCode::NeutralEigenvector, "neutral basis vector");
      (cls.kind == VectorKind::Positive ? plus : minus).push_back(v);
    }
  } else {
    const Matrix a = group.generator_matrix();
    const auto eig = general_eig(a);
    const double scale = std::max(1.0, a.frobenius_norm());
    double top = 1.0;
    for (const auto& l : eig.eigenvalues) top = std::max(top, std::abs(l));
    const double cluster_tol = 1e-6 * top;

    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      std::size_t size = 0;
      Complex mean = 0.0;
      for (std::size_t k = i; k < n; ++k) {
        if (!used[k] && std::abs(eig.eigenvalues[k] - eig.eigenvalues[i]) <= cluster_tol) {
          used[k] = true;
          mean += eig.eigenvalues[k];
          ++size;
        }
      }
      mean /= static_cast<double>(size);
      const Matrix e = eigenspace(a, mean, scale);
      if (e.cols() != size) fail(ErrorCode::NotDiagonalizable, "generator lacks a full eigenbasis");
      Matrix block = gram_block(g, e, e);
      block = 0.5 * (block + block.adjoint());
      const auto be = herm_eig(block, 1e-6);
      const Matrix vs = e * be.eigenvectors;
      for (std::size_t k = 0; k < size; ++k) {
        const double value = be.eigenvalues[k];
        if (std::abs(value) <= 1e-8 * std::max(1.0, spectral_norm(g)))
          fail(ErrorCode::NeutralEigenvector,
               "an eigenvector of the generator is neutral; no invariant decomposition");
        (value > 0.0 ? plus : minus).push_back(vs.column(k));
      }
    }
  }
  if (plus.empty() || minus.empty())
    fail(ErrorCode::NotIndefinite, "eigenvectors do not split into both signs");
  auto d = decomposition_from_bases(space, Matrix::from_columns(plus), Matrix::from_columns(minus));
  if (invariance_residual(d, group) > kGroupTol)
    fail(ErrorCode::NotDiagonalizable, "eigenvector decomposition is not invariant under U(t)");
  return d;
}

double invariance_residual(const FundamentalDecomposition& decomp, const Group& group) {
  const Matrix p_plus = decomp.projector_plus();
  const Matrix p_minus = decomp.projector_minus();
  double worst = 0.0;
  for (double t : kTestTimes) {
    const Matrix u = group.at(t);
    const double unorm = std::max(1.0, u.frobenius_norm());
    worst = std::max(worst, (p_minus * u * p_plus).frobenius_norm() / unorm);
    worst = std::max(worst, (p_plus * u * p_minus).frobenius_norm() / unorm);
  }
  return worst;
}

GeneratorEstimate generator(const KreinSpace& space, const Group& group, double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "dt must be positive");
  GeneratorEstimate out;
  out.a = Complex(1.0 / dt, 0.0) * principal_log(group.at(dt));
  out.reproduction_residual = 0.0;
  for (double t : {0.25, 0.5, 1.0}) {
    const Matrix u = group.at(t);
    const Matrix approx = matrix_exp(Complex(t, 0.0) * out.a);
    out.reproduction_residual =
        std::max(out.reproduction_residual, (approx - u).frobenius_norm() / std::max(1.0, u.frobenius_norm()));
  }
  try {
    const auto m = invariant_decomposition(space, group);
    const Matrix ia = Complex(0.0, 1.0) * out.a;
    const Matrix& h = m.metric;
    out.self_adjoint_residual = (h * ia - ia.adjoint() * h).frobenius_norm() /
                                std::max(1e-300, h.frobenius_norm() * std::max(1.0, ia.frobenius_norm()));
  } catch (const Error&) {
    out.self_adjoint_residual.reset();
  }
  return out;
}

LineSpectrum line_spectrum_check(const SemigroupSpec& spec, double tol) {
  LineSpectrum out{};
  if (spec.is_diagonal()) {
    out.eigenvalues = spec.diagonal_form().lambdas;
  } else {
    const auto eig = general_eig(spec.generator_form().generator);
    if (!(eig.condition <= kDiagonalizableCondition))
      fail(ErrorCode::NotDiagonalizable, "generator eigenvectors are (nearly) dependent");
    out.eigenvalues = eig.eigenvalues;
  }
  double sum = 0.0;
  double scale = 1.0;
  for (const auto& l : out.eigenvalues) {
    sum += l.real();
    scale = std::max(scale, std::abs(l));
  }
  out.real_part = sum / static_cast<double>(out.eigenvalues.size());
  double spread = 0.0;
  for (const auto& l : out.eigenvalues) spread = std::max(spread, std::abs(l.real() - out.real_part));
  out.on_line = spread <= tol * scale;
  return out;
}

}  // namespace krein
