#pragma once

// Finite-dimensional indefinite inner product spaces.
//
// A space is a Hermitian Gram matrix G with [f, g] = f^dagger G g, i.e. the
// form is conjugate-linear in its first argument and linear in its second.

#include <cstddef>
#include <utility>

#include "krein/numerics.hpp"

namespace krein {

struct Signature {
  std::size_t positive = 0;
  std::size_t negative = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

class KreinSpace {
 public:
  /// Validates Hermiticity, nondegeneracy and genuine indefiniteness.
  /// Throws NotHermitian, DegenerateSpace or NotIndefinite.
  explicit KreinSpace(Matrix gram, double tol = kDefaultTol);

  std::size_t dim() const noexcept { return gram_.rows(); }
  const Matrix& gram() const noexcept { return gram_; }
  Signature signature() const noexcept { return signature_; }
  double tol() const noexcept { return tol_; }
  /// Ascending spectrum of the Gram matrix and its eigenvectors.
  const HermitianEig& spectrum() const noexcept { return spectrum_; }
  /// G^{-1}, cached at construction.
  const Matrix& gram_inverse() const noexcept { return gram_inv_; }

 private:
  Matrix gram_;
  double tol_;
  Signature signature_;
  HermitianEig spectrum_;
  Matrix gram_inv_;
};

enum class VectorKind { Positive, Negative, Neutral };

struct VectorClass {
  VectorKind kind;
  double value;  // [f, f]
};

std::string_view to_string(VectorKind kind);

Complex indefinite_inner(const KreinSpace& space, std::span<const Complex> f,
                         std::span<const Complex> g);

/// Positive iff [f,f] > tol ||f||^2, Negative iff [f,f] < -tol ||f||^2.
VectorClass classify_vector(const KreinSpace& space, std::span<const Complex> f);

struct Quotient {
  KreinSpace space;
  /// r x n map from original coordinates to quotient coordinates; satisfies
  /// [f, g] = [P f, P g]' for all f, g.
  Matrix projection;
};

/// Removes the isotropic part ker(G) of a possibly singular Hermitian form.
/// Kept eigen-directions are ordered by descending Gram eigenvalue.
Quotient quotient_degenerate(const Matrix& gram, double tol = kDefaultTol);

/// A fundamental decomposition H = L+ [+] L- together with its symmetry J.
struct FundamentalDecomposition {
  Matrix gram;         // Gram matrix of the space it was built over
  Matrix basis_plus;   // n x p, [.,.]-orthonormal columns spanning L+
  Matrix basis_minus;  // n x q, columns with [e,e] = -1 spanning L-
  Matrix j;            // fundamental symmetry, J^2 = I
  Matrix metric;       // H_J = J^dagger G, Hermitian positive definite

  std::size_t dim() const noexcept { return j.rows(); }
  /// (I + J) / 2 and (I - J) / 2.
  Matrix projector_plus() const;
  Matrix projector_minus() const;
};

/// Canonical decomposition: L+- are the spectral subspaces of G.
FundamentalDecomposition fundamental_decomposition(const KreinSpace& space);

/// Decomposition spanned by caller-supplied bases. Columns need not be
/// normalized; each block is orthonormalized in [.,.] internally.
FundamentalDecomposition decomposition_from_bases(const KreinSpace& space,
                                                  const Matrix& basis_plus,
                                                  const Matrix& basis_minus);

/// Residuals of the decomposition invariants.
struct DecompositionAudit {
  double involution;        // ||J^2 - I||_F
  double self_adjoint;      // ||G J - J^dagger G||_F / ||G||_F
  double cross_orthogonal;  // max |[b+_i, b-_j]|
  double metric_min_eig;    // smallest eigenvalue of H_J
};
DecompositionAudit audit(const FundamentalDecomposition& d);

/// <f, g>_J = [J f, g].
Complex definite_inner(const FundamentalDecomposition& decomp, std::span<const Complex> f,
                       std::span<const Complex> g);

/// W^[*] = G^{-1} W^dagger G, the adjoint with respect to [.,.].
Matrix krein_adjoint(const KreinSpace& space, const Matrix& w);

/// [.,.]-Gram matrix of a set of columns, B^dagger G B.
Matrix gram_block(const Matrix& gram, const Matrix& a, const Matrix& b);

}  // namespace krein
