#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "krein/numerics.hpp"

namespace krein {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Rotate the phase of v so that its first largest-modulus entry is real
// positive. Makes eigenvector output deterministic.
void normalize_phase(Matrix& v, std::size_t col) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t r = 0; r < v.rows(); ++r) {
    const double m = std::abs(v(r, col));
    if (m > best_abs * (1.0 + 1e-12) + 1e-300) {
      best_abs = m;
      best = r;
    }
  }
  if (best_abs <= 0.0) return;
  const Complex phase = std::conj(v(best, col)) / best_abs;
  for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) *= phase;
  v(best, col) = Complex(v(best, col).real(), 0.0);
}

}  // namespace

HermitianEig herm_eig(const Matrix& m, double tol) {
  if (!m.is_square()) fail(ErrorCode::DimensionMismatch, "herm_eig needs a square matrix");
  if (!m.all_finite()) fail(ErrorCode::NonFinite, "herm_eig input");
  const std::size_t n = m.rows();
  const double scale = m.frobenius_norm();
  if (n == 0) return {};
  if ((m - m.adjoint()).frobenius_norm() > tol * std::max(scale, 1e-300) && scale > 0.0)
    fail(ErrorCode::NotHermitian, "symmetry residual exceeds tolerance");

  // Symmetrize so the iteration works on an exactly Hermitian matrix.
  Matrix a = 0.5 * (m + m.adjoint());
  Matrix v = Matrix::identity(n);

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= kEps * std::max(scale, 1e-300) * 0.1 || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip rotations that cannot change the diagonal at working precision.
        if (sweep > 3 && mag < kEps * 1e-2 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / mag;  // e^{i phi}
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // V block = diag(1, conj(phase)) * [[c, s], [-s, c]].
        const Complex vpp = c;
        const Complex vpq = s;
        const Complex vqp = -s * std::conj(phase);
        const Complex vqq = c * std::conj(phase);
        // A <- A V on columns p, q.
        for (std::size_t i = 0; i < n; ++i) {
          const Complex aip = a(i, p);
          const Complex aiq = a(i, q);
          a(i, p) = aip * vpp + aiq * vqp;
          a(i, q) = aip * vpq + aiq * vqq;
        }
        // A <- V^dagger A on rows p, q.
        for (std::size_t j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = std::conj(vpp) * apj + std::conj(vqp) * aqj;
          a(q, j) = std::conj(vpq) * apj + std::conj(vqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const Complex vip = v(i, p);
          const Complex viq = v(i, q);
          v(i, p) = vip * vpp + viq * vqp;
          v(i, q) = vip * vpq + viq * vqq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) fail(ErrorCode::NoConvergence, "Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    normalize_phase(out.eigenvectors, k);
  }
  return out;
}

SchurForm schur(const Matrix& input) {
  if (!input.is_square()) fail(ErrorCode::DimensionMismatch, "schur needs a square matrix");
  if (!input.all_finite()) fail(ErrorCode::NonFinite, "schur input");
  const std::size_t n = input.rows();
  Matrix h = input;
  Matrix z = Matrix::identity(n);
  if (n <= 1) return {z, h};

  // Householder reduction to upper Hessenberg form.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Vector x(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) x[i - k - 1] = h(i, k);
    const double xnorm = norm2(x);
    if (xnorm == 0.0) continue;
    const double x0abs = std::abs(x[0]);
    const Complex phase = x0abs > 0.0 ? x[0] / x0abs : Complex(1.0, 0.0);
    const Complex alpha = -phase * xnorm;
    Vector v = x;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm == 0.0) continue;
    for (auto& e : v) e /= vnorm;
    // H <- (I - 2 v v^dagger) H on rows k+1..n-1.
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * h(k + 1 + i, j);
      for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, j) -= 2.0 * v[i] * s;
    }
    // H <- H (I - 2 v v^dagger), Z likewise.
    for (std::size_t r = 0; r < n; ++r) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += h(r, k + 1 + i) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) h(r, k + 1 + i) -= 2.0 * s * std::conj(v[i]);
      Complex sz = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) sz += z(r, k + 1 + i) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) z(r, k + 1 + i) -= 2.0 * sz * std::conj(v[i]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }

  const double norm = std::max(h.frobenius_norm(), 1e-300);
  std::size_t iu = n - 1;
  int iter = 0;
  int total_iter = 0;
  const int max_total = 100 * static_cast<int>(n);
  while (iu > 0) {
    std::size_t il = iu;
    while (il > 0) {
      const double sub = std::abs(h(il, il - 1));
      const double diag = std::abs(h(il - 1, il - 1)) + std::abs(h(il, il));
      if (sub <= kEps * (diag > 0.0 ? diag : norm)) {
        h(il, il - 1) = 0.0;
        break;
      }
      --il;
    }
    if (il == iu) {
      --iu;
      iter = 0;
      continue;
    }
    if (++total_iter > max_total) fail(ErrorCode::NoConvergence, "shifted QR did not converge");
    ++iter;

    Complex shift;
    if (iter == 10 || iter == 30) {
      // Exceptional shift breaks rare cycling.
      double kick = std::abs(h(iu, iu - 1));
      if (iu >= 2) kick += std::abs(h(iu - 1, iu - 2));
      shift = h(iu, iu) + kick;
    } else {
      const Complex a = h(iu - 1, iu - 1);
      const Complex b = h(iu - 1, iu);
      const Complex c = h(iu, iu - 1);
      const Complex d = h(iu, iu);
      const Complex half_tr = 0.5 * (a + d);
      const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
      const Complex l1 = half_tr + disc;
      const Complex l2 = half_tr - disc;
      shift = std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
    }

    Complex x = h(il, il) - shift;
    Complex y = h(il + 1, il);
    for (std::size_t k = il; k < iu; ++k) {
      if (k > il) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const double r = std::hypot(std::abs(x), std::abs(y));
      if (r == 0.0) continue;
      double c;
      Complex s;
      if (std::abs(x) == 0.0) {
        c = 0.0;
        s = 1.0;
      } else {
        c = std::abs(x) / r;
        s = (x / std::abs(x)) * std::conj(y) / r;
      }
      // Rows k, k+1: G = [[c, s], [-conj(s), c]].
      for (std::size_t j = (k > il ? k - 1 : il); j < n; ++j) {
        const Complex a1 = h(k, j);
        const Complex b1 = h(k + 1, j);
        h(k, j) = c * a1 + s * b1;
        h(k + 1, j) = -std::conj(s) * a1 + c * b1;
      }
      if (k > il) h(k + 1, k - 1) = 0.0;
      // Columns k, k+1: multiply by G^dagger.
      const std::size_t last = std::min(k + 2, iu);
      for (std::size_t i = 0; i <= last; ++i) {
        const Complex a1 = h(i, k);
        const Complex b1 = h(i, k + 1);
        h(i, k) = a1 * c + b1 * std::conj(s);
        h(i, k + 1) = -a1 * s + b1 * c;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const Complex a1 = z(i, k);
        const Complex b1 = z(i, k + 1);
        z(i, k) = a1 * c + b1 * std::conj(s);
        z(i, k + 1) = -a1 * s + b1 * c;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) h(i, j) = 0.0;
  return {z, h};
}

GeneralEig general_eig(const Matrix& a) {
  const auto [z, t] = schur(a);
  const std::size_t n = a.rows();
  GeneralEig out;
  out.eigenvalues = t.diagonal_entries();
  const double small = kEps * std::max(t.frobenius_norm(), 1e-300);
  Matrix y(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex lambda = t(k, k);
    y(k, k) = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
      Complex s = 0.0;
      for (std::size_t l = jj + 1; l <= k; ++l) s += t(jj, l) * y(l, k);
      Complex denom = t(jj, jj) - lambda;
      if (std::abs(denom) < small) denom = small;
      y(jj, k) = -s / denom;
    }
  }
  Matrix v = z * y;
  for (std::size_t k = 0; k < n; ++k) {
    const double nrm = norm2(v.column(k));
    for (std::size_t r = 0; r < n; ++r) v(r, k) /= nrm;
  }
  out.eigenvectors = v;
  out.condition = condition_number(v);
  return out;
}

SingularValues svd(const Matrix& a) {
  if (!a.is_square()) fail(ErrorCode::DimensionMismatch, "svd expects a square matrix");
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix v = Matrix::identity(n);
  const auto col_dot = [n](const Matrix& m, std::size_t p, std::size_t q) {
    Complex s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += std::conj(m(r, p)) * m(r, q);
    return s;
  };
  // One-sided Jacobi: rotate column pairs of A V until they are orthogonal.
  bool converged = n < 2;
  for (int sweep = 0; sweep < 80 && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = col_dot(work, p, p).real();
        const double beta = col_dot(work, q, q).real();
        const Complex gamma = col_dot(work, p, q);
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= 1e-15 * std::sqrt(alpha * beta)) continue;
        converged = false;
        const Complex phase = std::conj(gamma) / g;  // e^{-i arg gamma}
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Matrix* m : {&work, &v}) {
          for (std::size_t r = 0; r < n; ++r) {
            const Complex xp = (*m)(r, p);
            const Complex xq = (*m)(r, q) * phase;
            (*m)(r, p) = c * xp - s * xq;
            (*m)(r, q) = s * xp + c * xq;
          }
        }
      }
    }
  }
  if (!converged) fail(ErrorCode::NoConvergence, "one-sided Jacobi SVD did not converge");

  std::vector<std::size_t> order(n);
  std::vector<double> norms(n);
  for (std::size_t k = 0; k < n; ++k) {
    order[k] = k;
    norms[k] = std::sqrt(col_dot(work, k, k).real());
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SingularValues out{Matrix(n, n), {}, Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values.push_back(norms[src]);
    for (std::size_t r = 0; r < n; ++r) {
      out.right(r, k) = v(r, src);
      out.left(r, k) = norms[src] > 0.0 ? work(r, src) / norms[src] : Complex(r == k ? 1.0 : 0.0);
    }
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  if (!a.is_square()) {
    const auto e = herm_eig(a.adjoint() * a, 1e-6);
    return std::sqrt(std::max(0.0, e.eigenvalues.back()));
  }
  return svd(a).values.front();
}

double condition_number(const Matrix& a) {
  const auto s = svd(a);
  if (!(s.values.back() > 0.0)) return std::numeric_limits<double>::infinity();
  return s.values.front() / s.values.back();
}

double metric_operator_norm(const Matrix& a, const Matrix& h) {
  const Matrix l = cholesky(h);
  // L^dagger A L^{-dagger}
  const Matrix l_adj = l.adjoint();
  const Matrix b = l_adj * a * inverse(l_adj);
  return spectral_norm(b);
}

}  // namespace krein
