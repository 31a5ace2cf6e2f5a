#pragma once

// One-parameter semigroups W(t) on a Krein space, their normalization into
// groups U(t) that preserve [.,.], and diagnostics of the evolved
// fundamental symmetries J_t = U(t) J U(t)^{-1}.
//
// Every semigroup here is a matrix or diagonal exponential, so t -> W(t) is
// continuous; the exponential law for theta(t) is used without a separate
// continuity check.

#include <cstdint>
#include <optional>
#include <variant>

#include "krein/cone_ops.hpp"
#include "krein/krein_space.hpp"

namespace krein {

/// W(t) f_n = exp(lambda_n t) f_n on a [.,.]-orthonormal basis f_n.
struct DiagonalForm {
  Matrix basis;  // columns f_n with |[f_n, f_m]| = delta_nm
  Vector lambdas;
};

/// W(t) = exp(t A).
struct GeneratorForm {
  Matrix generator;
};

class SemigroupSpec {
 public:
  static SemigroupSpec diagonal(Matrix basis, Vector lambdas);
  static SemigroupSpec from_generator(Matrix generator);

  std::size_t dim() const;
  bool is_diagonal() const { return std::holds_alternative<DiagonalForm>(form_); }
  const DiagonalForm& diagonal_form() const { return std::get<DiagonalForm>(form_); }
  const GeneratorForm& generator_form() const { return std::get<GeneratorForm>(form_); }

  /// Generator matrix in coordinates (B diag(lambda) B^{-1} for diagonal specs).
  Matrix generator_matrix() const;
  /// exp(t (A - shift I)) for any real t.
  Matrix exp_shifted(double t, double shift) const;

 private:
  explicit SemigroupSpec(std::variant<DiagonalForm, GeneratorForm> form) : form_(std::move(form)) {}
  std::variant<DiagonalForm, GeneratorForm> form_;
};

/// Checks the diagonal basis invariants against a space (|[f_n, f_m]| = delta).
/// Throws NotOrthogonal or DimensionMismatch.
void validate_spec(const KreinSpace& space, const SemigroupSpec& spec);

/// W(t), t >= 0. Throws NegativeTime.
Matrix evolve(const SemigroupSpec& spec, double t);

/// {0.1, 0.2, ..., 2.0}
std::vector<double> default_alpha_grid();

struct ExponentialFit {
  double alpha;
  double residual;  // max |ln theta(t) - alpha t|
};

/// Least-squares slope of ln theta(t) against t through the origin
/// (theta(0) = 1).
ExponentialFit fit_exponential_law(std::span<const double> t, std::span<const double> theta);

/// alpha with theta(t) = exp(alpha t). Throws NotPositiveBijection when some
/// W(t) fails the bijection certificate and ExponentialLawViolation when
/// ln theta is not linear in t.
double fit_alpha(const KreinSpace& space, const SemigroupSpec& spec,
                 std::span<const double> t_grid, std::uint64_t seed);

class Group {
 public:
  Group(SemigroupSpec spec, double alpha) : spec_(std::move(spec)), alpha_(alpha) {}

  const SemigroupSpec& spec() const noexcept { return spec_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const { return spec_.dim(); }

  /// U(t) = exp(-alpha t / 2) W(t); for t < 0 this is U(-t)^{-1}.
  Matrix at(double t) const { return spec_.exp_shifted(t, 0.5 * alpha_); }
  /// Exact generator A - (alpha / 2) I.
  Matrix generator_matrix() const;

 private:
  SemigroupSpec spec_;
  double alpha_;
};

/// Largest relative residual ||U^dagger G U - G|| / (||U||^2 ||G||) over a
/// fixed set of test times.
double group_unitarity_residual(const KreinSpace& space, const Group& group);

/// Throws UnitarityResidual if U(t) fails to preserve [.,.].
Group normalize_to_group(const KreinSpace& space, const SemigroupSpec& spec, double alpha);

/// J_t = U(t) J U(t)^{-1}.
Matrix evolved_symmetry(const FundamentalDecomposition& decomp, const Group& group, double t);

/// Decomposition spanned by U(t) L+ and U(t) L-.
FundamentalDecomposition evolved_decomposition(const KreinSpace& space,
                                               const FundamentalDecomposition& decomp,
                                               const Group& group, double t);

struct QOperator {
  Matrix q;
  double exp_residual;              // ||e^Q - J_L J_M|| / ||J_L J_M||
  double inverse_residual;          // ||e^{-Q} - J_M J_L|| / ||J_M J_L||
  double anticommutation_residual;  // ||J_L Q + Q J_L|| / max(1, ||Q||)
};

/// Q = ln(J_L J_M) taken in the metric H_L. Throws NonPositiveSpectrum.
QOperator q_operator(const FundamentalDecomposition& decomp_l,
                     const FundamentalDecomposition& decomp_m);

struct UnitaryFactorization {
  Matrix q_t;
  Matrix y_t;
  double reconstruction_residual;   // ||e^{-Q_t/2} Y_t - U(t)|| / max(1, ||U(t)||)
  double unitarity_residual;        // ||H_L Y_t^{-1} - Y_t^dagger H_L|| / ||H_L||
  double commutation_residual;      // ||J Y_t - Y_t J||
  double q_anticommutation_residual;
  double exp_residual;              // ||e^{Q_t} - J J_t|| / max(1, ||J J_t||)
  double norm_identity_residual;    // max | ||Y f||_L - ||f||_L | / ||f||_L, sampled f
};

/// U(t) = e^{-Q_t/2} Y_t with e^{Q_t} = J J_t and Y_t unitary in <.,.>_L.
/// Computed as the polar decomposition of U(t) in <.,.>_L.
UnitaryFactorization factorize_unitary(const KreinSpace& space,
                                       const FundamentalDecomposition& decomp,
                                       const Group& group, double t);

struct FlowRow {
  double t;
  double jt_norm;
  std::optional<double> q_anticomm_residual;
  std::optional<double> factorization_residual;
  double unitarity_residual;
};

struct FlowReport {
  std::vector<FlowRow> rows;
  bool uniformly_bounded = false;
  double bound_c = 0.0;
  double max_norm = 0.0;
  /// Least-squares slope of ln ||J_t|| against |t|.
  double growth_rate = 0.0;
};

/// Operator norms of J_t in <.,.>_L over the grid. bound_c defaults to ten
/// times the norm at t = 0.
FlowReport uniform_bound_scan(const KreinSpace& space, const FundamentalDecomposition& decomp,
                              const Group& group, std::span<const double> t_grid,
                              std::optional<double> bound_c = std::nullopt);

/// A decomposition M+ [+] M- invariant under the group, assembled from the
/// generator's eigenvectors grouped by the sign of [v, v]. Throws
/// NeutralEigenvector when an eigenspace carries a neutral vector and
/// NotDiagonalizable when the generator has no eigenbasis.
FundamentalDecomposition invariant_decomposition(const KreinSpace& space, const Group& group);

/// max ||(I - P) U(t) P|| over test times, P the projectors of the decomposition.
double invariance_residual(const FundamentalDecomposition& decomp, const Group& group);

struct GeneratorEstimate {
  Matrix a;
  double reproduction_residual;                // max ||exp(tA) - U(t)|| / max(1, ||U(t)||)
  std::optional<double> self_adjoint_residual; // iA in <.,.>_M, when M exists
};

/// A = log(U(dt)) / dt via the principal logarithm.
GeneratorEstimate generator(const KreinSpace& space, const Group& group, double dt = 1e-3);

struct LineSpectrum {
  bool on_line;
  double real_part;  // mean real part, alpha / 2 for a bijective semigroup
  Vector eigenvalues;
};

/// Whether all generator eigenvalues share one real part.
LineSpectrum line_spectrum_check(const SemigroupSpec& spec, double tol = kDefaultTol);

}  // namespace krein
