#pragma once

// Operators known only through their action on the positive cone
// F++ = { f : [f, f] > 0 }, and the scaled-unitarity test that characterizes
// bijections of that cone.

#include <cstdint>
#include <functional>
#include <optional>

#include "krein/krein_space.hpp"

namespace krein {

/// A black-box operator that is only required to be defined on positive
/// vectors. Returning std::nullopt means "not defined at this input".
/// The oracle must be deterministic and reentrant.
struct PartialOperator {
  std::function<std::optional<Vector>(std::span<const Complex>)> eval;
};

/// Restriction of a matrix to F++; refuses non-positive inputs.
PartialOperator restrict_to_positive_cone(const KreinSpace& space, Matrix w);

/// `count` random Positive vectors drawn by rejection from complex Gaussians
/// whitened by the Gram spectrum. Deterministic per seed.
std::vector<Vector> sample_positive(const KreinSpace& space, std::uint64_t seed,
                                    std::size_t count);

/// c > 0 with [f + c f+, f + c f+] >= c^2 [f+, f+] / 2.
double shift_coefficient(const KreinSpace& space, std::span<const Complex> f,
                         std::span<const Complex> f_plus);

/// Unit vector along the top eigenvector of the Gram matrix.
Vector canonical_positive_vector(const KreinSpace& space);

struct ExtensionResult {
  Vector value;
  double audit_spread;  // max distance between the three evaluations
};

/// Linear extension of `op` from F++ to f, W f = W(f + c f+) - c W f+.
/// Re-evaluates with 2c and with a second positive direction; throws
/// InconsistentOracle if the three disagree beyond tol * (||Wf|| + 1) and
/// NotDefined if the oracle refuses a positive input.
ExtensionResult extend_operator(const KreinSpace& space, const PartialOperator& op,
                                std::span<const Complex> f);

struct ThetaReport {
  double theta = 0.0;
  bool is_scaled_unitary = false;
  double residual = 0.0;  // ||W^[*] W - theta I||_F / ||W||_F^2
  double sampled_min = 0.0;
  double sampled_max = 0.0;
  bool invertible = false;
};

inline constexpr std::size_t kDefaultSampleCount = 64;

/// Scaled-unitarity test [Wf, Wg] = theta [f, g]. theta comes from the trace
/// formula; the sampled ratios [Wf,Wf]/[f,f] are a cross-check only.
ThetaReport theta_of(const KreinSpace& space, const Matrix& w, std::uint64_t seed,
                     std::size_t samples = kDefaultSampleCount);

struct BijectionCertificate {
  bool certified = false;
  ThetaReport theta;
  /// Every sampled positive f had W f and W^{-1} f positive.
  bool sampled_cone_preserved = false;
  /// The algebraic and sampled verdicts agree.
  bool checks_agree = false;
};

/// W maps F++ onto itself one-to-one iff it is theta-scaled unitary with
/// theta > 0. Throws SingularOperator if W is not invertible.
BijectionCertificate positive_bijection_certificate(const KreinSpace& space, const Matrix& w,
                                                    std::uint64_t seed,
                                                    std::size_t samples = kDefaultSampleCount);

/// Diagonal operators with [.,.]-orthonormal eigenvectors biject F++ iff
/// all eigenvalue moduli coincide.
bool diagonal_criterion(std::span<const double> moduli, double tol = kDefaultTol);

}  // namespace krein
