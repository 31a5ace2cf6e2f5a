#include "krein/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace krein {
namespace {

const Complex kI(0.0, 1.0);

Matrix sigma1() { return Matrix{{0.0, 1.0}, {1.0, 0.0}}; }
Matrix sigma2() { return Matrix{{0.0, -kI}, {kI, 0.0}}; }
Matrix sigma3() { return Matrix{{1.0, 0.0}, {0.0, -1.0}}; }

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) fail(ErrorCode::GridMismatch, "functions live on different grids");
}

// Catmull-Rom interpolation of grid samples at y, zero outside the grid.
Complex interpolate(const GridFunction& f, double y) {
  const Grid& grid = f.grid();
  const Vector& v = f.values();
  if (y < grid.lo() || y > grid.hi()) return 0.0;
  const double s = (y - grid.lo()) / grid.spacing();
  const auto last = static_cast<std::ptrdiff_t>(grid.size()) - 1;
  auto i = static_cast<std::ptrdiff_t>(std::floor(s));
  i = std::clamp<std::ptrdiff_t>(i, 0, last - 1);
  const double u = s - static_cast<double>(i);
  const auto at = [&](std::ptrdiff_t k) -> Complex {
    return (k < 0 || k > last) ? Complex(0.0) : v[static_cast<std::size_t>(k)];
  };
  const Complex p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  const double u2 = u * u;
  const double u3 = u2 * u;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3);
}

}  // namespace

KreinSpace minkowski_space() {
  const double d[] = {1.0, -1.0, -1.0, -1.0};
  return KreinSpace(Matrix::diagonal(std::span<const double>(d)));
}

Matrix column_rank_basis(const Matrix& a, double tol) {
  const std::size_t n = a.cols();
  std::vector<Vector> residual;
  double top = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    residual.push_back(a.column(c));
    top = std::max(top, norm2(residual.back()));
  }
  std::vector<Vector> picked;
  std::vector<bool> used(n, false);
  while (true) {
    std::size_t best = n;
    double best_norm = tol * top;
    for (std::size_t c = 0; c < n; ++c) {
      const double r = norm2(residual[c]);
      if (!used[c] && r > best_norm) {
        best = c;
        best_norm = r;
      }
    }
    if (best == n) break;
    used[best] = true;
    picked.push_back(a.column(best));
    const Vector q = Complex(1.0 / best_norm, 0.0) * residual[best];
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      const Complex coef = dot(q, residual[c]);
      for (std::size_t r = 0; r < q.size(); ++r) residual[c][r] -= coef * q[r];
    }
  }
  if (picked.empty()) return Matrix(a.rows(), 0);
  return Matrix::from_columns(picked);
}

PauliModel pauli_family(double rho, double xi) {
  KreinSpace space(sigma1());
  const Matrix id = Matrix::identity(2);
  const Matrix z = std::cos(xi) * sigma2() + Complex(std::sin(xi)) * sigma3();
  const Matrix exp_q = Complex(std::cosh(rho)) * id + Complex(std::sinh(rho)) * z;
  const Matrix j_m = sigma1() * exp_q;
  Matrix m_plus = column_rank_basis(id + j_m);
  Matrix m_minus = column_rank_basis(id - j_m);
  auto decomp_l = fundamental_decomposition(space);
  auto decomp_m = decomposition_from_bases(space, m_plus, m_minus);
  return PauliModel{std::move(space), sigma1(), z,     Complex(rho) * z,
                    exp_q,            j_m,      std::move(m_plus), std::move(m_minus),
                    std::move(decomp_l), std::move(decomp_m)};
}

DiagonalModel diagonal_model(std::span<const int> signs, std::span<const Complex> lambdas) {
  if (signs.size() != lambdas.size() || signs.empty())
    fail(ErrorCode::DimensionMismatch, "need one sign per exponent");
  std::vector<double> d;
  for (int s : signs) {
    if (s != 1 && s != -1) fail(ErrorCode::InvalidArgument, "signs must be +1 or -1");
    d.push_back(s);
  }
  KreinSpace space(Matrix::diagonal(std::span<const double>(d)));
  auto spec = SemigroupSpec::diagonal(Matrix::identity(d.size()), Vector(lambdas.begin(), lambdas.end()));
  return DiagonalModel{std::move(space), std::move(spec)};
}

BoostModel boost_model() {
  const double d[] = {1.0, -1.0};
  return BoostModel{KreinSpace(Matrix::diagonal(std::span<const double>(d))),
                    SemigroupSpec::from_generator(sigma1())};
}

Grid::Grid(double lo, double hi, std::size_t m) : lo_(lo), hi_(hi), m_(m) {
  if (m < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    fail(ErrorCode::InvalidArgument, "grid needs at least two points on a finite interval");
}

Grid Grid::symmetric(double half_width, std::size_t m) { return Grid(-half_width, half_width, m); }

bool Grid::is_symmetric() const noexcept {
  return std::abs(lo_ + hi_) <= 1e-12 * (hi_ - lo_);
}

GridFunction::GridFunction(Grid grid, Vector values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    fail(ErrorCode::DimensionMismatch, "one value per grid point required");
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      fail(ErrorCode::NonFinite, "grid function values");
}

bool GridFunction::decays(double rel_tol) const {
  double top = 0.0;
  for (const auto& z : values_) top = std::max(top, std::abs(z));
  return std::abs(values_.front()) <= rel_tol * top && std::abs(values_.back()) <= rel_tol * top;
}

Complex pt_inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  const Grid& grid = f.grid();
  if (!grid.is_symmetric()) fail(ErrorCode::AsymmetricGrid, "grid is not symmetric about 0");
  const std::size_t m = grid.size();
  Complex sum = 0.0;
  // x_{m-1-k} = -x_k on a symmetric uniform grid.
  for (std::size_t k = 0; k < m; ++k)
    sum += grid.weight(k) * std::conj(f.values()[m - 1 - k]) * g.values()[k];
  return sum;
}

Complex l2_inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  Complex sum = 0.0;
  for (std::size_t k = 0; k < f.grid().size(); ++k)
    sum += f.grid().weight(k) * std::conj(f.values()[k]) * g.values()[k];
  return sum;
}

double dilation_time_limit(const Grid& grid) {
  return std::log(grid.half_width() / kDilationCore);
}

GridFunction dilate(const GridFunction& f, double t, bool normalized) {
  const double limit = dilation_time_limit(f.grid());
  if (!(std::abs(t) <= limit + 1e-12))
    fail(ErrorCode::TimeOutOfRange, "dilation time exceeds ln(L / L_core) = " + std::to_string(limit));
  const double scale = std::exp(t);
  const double prefactor = normalized ? std::exp(0.5 * t) : 1.0;
  Vector out(f.grid().size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = prefactor * interpolate(f, scale * f.grid().point(k));
  return GridFunction(f.grid(), std::move(out));
}

double dilation_theta(const GridFunction& f, double t) {
  const GridFunction wf = dilate(f, t, false);
  return pt_inner(wf, wf).real() / pt_inner(f, f).real();
}

Vector hermite_values(std::size_t count, Complex z) {
  Vector out(count);
  if (count == 0) return out;
  out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * z * z);
  if (count > 1) out[1] = std::sqrt(2.0) * z * out[0];
  for (std::size_t n = 1; n + 1 < count; ++n) {
    const double nd = static_cast<double>(n);
    out[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * z * out[n] - std::sqrt(nd / (nd + 1.0)) * out[n - 1];
  }
  return out;
}

HermiteBasis hermite_basis(std::size_t count, double shift, const Grid& grid) {
  if (count < 2) fail(ErrorCode::InvalidArgument, "need at least two basis functions");
  if (!std::isfinite(shift)) fail(ErrorCode::NonFinite, "shift");
  const double needed = std::sqrt(2.0 * static_cast<double>(count)) + 5.0;
  if (grid.half_width() < needed)
    fail(ErrorCode::GridTooNarrow, "grid half-width must be at least " + std::to_string(needed));

  std::vector<Vector> columns(count, Vector(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vector v = hermite_values(count, Complex(grid.point(k), shift));
    for (std::size_t n = 0; n < count; ++n) columns[n][k] = v[n];
  }
  HermiteBasis basis;
  basis.count = count;
  basis.shift = shift;
  for (auto& c : columns) {
    basis.functions.emplace_back(grid, std::move(c));
    if (!basis.functions.back().decays())
      fail(ErrorCode::GridTooNarrow, "basis functions do not decay at the grid ends");
  }
  basis.gram_pt = Matrix(count, count);
  basis.gram_l2 = Matrix(count, count);
  for (std::size_t n = 0; n < count; ++n)
    for (std::size_t m = 0; m < count; ++m) {
      basis.gram_pt(n, m) = pt_inner(basis.functions[n], basis.functions[m]);
      basis.gram_l2(n, m) = l2_inner(basis.functions[n], basis.functions[m]);
    }
  return basis;
}

KreinSpace hermite_coordinate_space(std::size_t count) {
  std::vector<double> d(count);
  for (std::size_t n = 0; n < count; ++n) d[n] = n % 2 == 0 ? 1.0 : -1.0;
  return KreinSpace(Matrix::diagonal(std::span<const double>(d)));
}

OscillatorModel oscillator_group(std::size_t count, double shift) {
  if (count < 2) fail(ErrorCode::InvalidArgument, "need at least two basis functions");
  Vector lambdas(count);
  for (std::size_t n = 0; n < count; ++n)
    lambdas[n] = Complex(0.0, 2.0 * static_cast<double>(n) + 1.0 + shift * shift);
  return OscillatorModel{hermite_coordinate_space(count),
                         Group(SemigroupSpec::diagonal(Matrix::identity(count), std::move(lambdas)), 0.0)};
}

double fourier_weight_check(const HermiteBasis& basis) {
  const Grid& grid = basis.functions.front().grid();
  const std::size_t m = grid.size();
  const double h = grid.spacing();
  const double step = 2.0 * std::numbers::pi / (static_cast<double>(m) * h);
  const double window = std::min(std::numbers::pi / h, grid.half_width());
  const auto jmax = static_cast<long>(std::floor(window / step));
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  const std::size_t count = basis.count;
  Matrix gram(count, count);
  Vector transform(count);
  for (long j = -jmax; j <= jmax; ++j) {
    const double delta = step * static_cast<double>(j);
    std::fill(transform.begin(), transform.end(), Complex(0.0));
    for (std::size_t k = 0; k < m; ++k) {
      const Complex phase = std::polar(grid.weight(k) * norm, -delta * grid.point(k));
      for (std::size_t n = 0; n < count; ++n) transform[n] += phase * basis.functions[n].values()[k];
    }
    const double weight = std::exp(2.0 * basis.shift * delta) * step;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = 0; b < count; ++b)
        gram(a, b) += weight * std::conj(transform[a]) * transform[b];
  }
  return (gram - Matrix::identity(count)).max_abs();
}

FundamentalDecomposition parity_decomposition(const HermiteBasis& basis) {
  if (basis.shift != 0.0)
    fail(ErrorCode::ShiftNotZero, "even/odd split only spans the basis for an unshifted basis");
  const std::size_t n = basis.count;
  const KreinSpace space = hermite_coordinate_space(n);
  const Matrix id = Matrix::identity(n);
  std::vector<Vector> even;
  std::vector<Vector> odd;
  for (std::size_t k = 0; k < n; ++k) (k % 2 == 0 ? even : odd).push_back(id.column(k));
  return decomposition_from_bases(space, Matrix::from_columns(even), Matrix::from_columns(odd));
}

std::vector<double> l2_norms(const HermiteBasis& basis) {
  std::vector<double> out;
  for (std::size_t n = 0; n < basis.count; ++n) out.push_back(std::sqrt(basis.gram_l2(n, n).real()));
  return out;
}

}  // namespace krein
