#pragma once

// Concrete spaces and dynamics: Minkowski space, the Pauli family on C^2,
// diagonal models, the 2D boost, and function-space models realized on
// uniform quadrature grids and truncated Hermite bases.

#include <vector>

#include "krein/dynamics.hpp"
#include "krein/krein_space.hpp"

namespace krein {

/// gram diag(1, -1, -1, -1).
KreinSpace minkowski_space();

struct PauliModel {
  KreinSpace space;  // gram sigma_1
  Matrix j_l;        // sigma_1
  Matrix z;          // cos(xi) sigma_2 + sin(xi) sigma_3
  Matrix q;          // rho Z
  Matrix exp_q;      // cosh(rho) I + sinh(rho) Z
  Matrix j_m;        // sigma_1 e^Q
  Matrix m_plus;     // raw rank basis of (I + J_M)
  Matrix m_minus;    // raw rank basis of (I - J_M)
  FundamentalDecomposition decomp_l;
  FundamentalDecomposition decomp_m;
};

PauliModel pauli_family(double rho, double xi);

/// Linearly independent columns of `a`, chosen greedily by largest residual
/// norm. Columns are returned unmodified.
Matrix column_rank_basis(const Matrix& a, double tol = 1e-10);

struct DiagonalModel {
  KreinSpace space;  // gram diag(signs)
  SemigroupSpec spec;
};

/// W(t) e_n = exp(lambda_n t) e_n on the standard basis. Throws NotIndefinite
/// and DimensionMismatch.
DiagonalModel diagonal_model(std::span<const int> signs, std::span<const Complex> lambdas);

struct BoostModel {
  KreinSpace space;  // gram diag(1, -1)
  SemigroupSpec spec;  // generator sigma_1: U(t) = [[cosh t, sinh t], [sinh t, cosh t]]
};

BoostModel boost_model();

// ---------------------------------------------------------------------------
// Function-space models.

/// m uniform points on [lo, hi] with trapezoid weights.
class Grid {
 public:
  Grid(double lo, double hi, std::size_t m);
  /// [-half_width, half_width].
  static Grid symmetric(double half_width, std::size_t m);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t size() const noexcept { return m_; }
  double spacing() const noexcept { return (hi_ - lo_) / static_cast<double>(m_ - 1); }
  double point(std::size_t k) const noexcept { return lo_ + spacing() * static_cast<double>(k); }
  double weight(std::size_t k) const noexcept {
    return (k == 0 || k + 1 == m_) ? 0.5 * spacing() : spacing();
  }
  bool is_symmetric() const noexcept;
  double half_width() const noexcept { return 0.5 * (hi_ - lo_); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double lo_;
  double hi_;
  std::size_t m_;
};

inline constexpr double kDefaultHalfWidth = 12.0;
inline constexpr std::size_t kDefaultGridSize = 2001;
inline constexpr std::size_t kFourierGridSize = 4096;
/// Support actually used by dilation fixtures; |t| is capped at
/// ln(half_width / kDilationCore).
inline constexpr double kDilationCore = 8.0;

class GridFunction {
 public:
  GridFunction(Grid grid, Vector values);

  template <class F>
  static GridFunction sample(const Grid& grid, F&& f) {
    Vector v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.point(k));
    return GridFunction(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  /// |f| at both endpoints is at most rel_tol * max |f|.
  bool decays(double rel_tol = 1e-8) const;

 private:
  Grid grid_;
  Vector values_;
};

/// Trapezoid quadrature of conj(f(-x)) g(x). Throws GridMismatch or AsymmetricGrid.
Complex pt_inner(const GridFunction& f, const GridFunction& g);
/// Trapezoid quadrature of conj(f(x)) g(x). Throws GridMismatch.
Complex l2_inner(const GridFunction& f, const GridFunction& g);

/// Largest |t| the dilation accepts on this grid.
double dilation_time_limit(const Grid& grid);

/// e^{t/2} f(e^t x) (or f(e^t x) when `normalized` is false) by Catmull-Rom
/// interpolation, zero outside the grid. Throws TimeOutOfRange.
GridFunction dilate(const GridFunction& f, double t, bool normalized = true);

/// [W f, W f] / [f, f] for the unnormalized dilation W(t) f = f(e^t x).
double dilation_theta(const GridFunction& f, double t);

struct HermiteBasis {
  std::size_t count = 0;
  double shift = 0.0;
  std::vector<GridFunction> functions;  // phi_n(x) = f_n(x + i shift)
  Matrix gram_pt;
  Matrix gram_l2;
};

/// Normalized Hermite functions at x + i a by the three-term recurrence.
/// Throws InvalidArgument for count < 2 and GridTooNarrow when the grid is
/// too short for the functions to decay.
HermiteBasis hermite_basis(std::size_t count, double shift, const Grid& grid);

/// f_n(z) for n = 0..count-1 at one complex point.
Vector hermite_values(std::size_t count, Complex z);

/// Coordinates in the phi_n basis: gram diag((-1)^n).
KreinSpace hermite_coordinate_space(std::size_t count);

struct OscillatorModel {
  KreinSpace space;
  Group group;  // phases exp(i (2n + 1 + a^2) t), alpha = 0
};

OscillatorModel oscillator_group(std::size_t count, double shift);

/// max |G_fw - I| where G_fw[n][m] integrates e^{2 a delta} conj(F phi_n) F phi_m
/// over the discrete Fourier frequencies of the grid. The transform is the
/// unitary one, (F f)(delta) = (2 pi)^{-1/2} int f(x) e^{-i delta x} dx,
/// evaluated by the same trapezoid rule; frequencies are restricted to
/// |delta| <= min(pi / h, half_width) so the exponential weight never
/// multiplies pure round-off.
double fourier_weight_check(const HermiteBasis& basis);

/// L+ = even-index phi_n, L- = odd-index phi_n, J = diag((-1)^n) in basis
/// coordinates. Throws ShiftNotZero for a shifted basis.
FundamentalDecomposition parity_decomposition(const HermiteBasis& basis);

/// ||phi_n||_{L2} for each basis function.
std::vector<double> l2_norms(const HermiteBasis& basis);

}  // namespace krein
