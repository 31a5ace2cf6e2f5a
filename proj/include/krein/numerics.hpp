#pragma once

// Dense complex linear algebra used by every other part of the library.
// Matrices are small (tens of rows) and stored row-major; all routines are
// pure functions of their inputs.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "krein/error.hpp"

namespace krein {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

/// Default relative tolerance for algebraic residuals.
inline constexpr double kDefaultTol = 1e-9;
/// Floor below which an eigenvalue is treated as non-positive.
inline constexpr double kSpectralFloor = 1e-12;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major);
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix diagonal(std::span<const Complex> diag);
  static Matrix diagonal(std::span<const double> diag);
  /// Matrix whose columns are the given vectors (all of equal length).
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> data() const noexcept { return data_; }

  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const Complex> v);
  Vector diagonal_entries() const;
  /// Columns [first, first + count).
  Matrix columns(std::size_t first, std::size_t count) const;

  Matrix adjoint() const;
  Matrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(Complex s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Matrix a, Complex s);
Matrix operator*(Complex s, Matrix a);
Vector operator*(const Matrix& a, std::span<const Complex> x);

/// Horizontal concatenation [a b].
Matrix hstack(const Matrix& a, const Matrix& b);

// Vector helpers.
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(Complex s, const Vector& a);
/// Standard Hermitian product sum conj(a_i) b_i.
Complex dot(std::span<const Complex> a, std::span<const Complex> b);
double norm2(std::span<const Complex> a);

/// Relative difference ||a - b||_F / max(1, ||b||_F).
double rel_diff(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition.

struct HermitianEig {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // unitary, columns match eigenvalues
};

/// Cyclic Jacobi eigensolver for a Hermitian matrix. Each eigenvector is
/// phase-normalized so that its first largest-modulus entry is real positive.
HermitianEig herm_eig(const Matrix& m, double tol = kDefaultTol);

/// ||m - m^dagger||_F / max(1e-300, ||m||_F).
double hermitian_residual(const Matrix& m);

// ---------------------------------------------------------------------------
// General (non-normal) eigenproblem.

struct SchurForm {
  Matrix unitary;     // Z
  Matrix triangular;  // T, with A = Z T Z^dagger
};

/// Complex Schur decomposition by Hessenberg reduction and shifted QR.
SchurForm schur(const Matrix& a);

struct GeneralEig {
  Vector eigenvalues;   // diagonal of the Schur form, in Schur order
  Matrix eigenvectors;  // unit-norm columns
  double condition;     // 2-norm condition number of the eigenvector matrix
};

GeneralEig general_eig(const Matrix& a);

// ---------------------------------------------------------------------------
// Linear solves.

struct LuFactor {
  Matrix lu;
  std::vector<std::size_t> pivots;
};

/// LU with partial pivoting; throws Singular if a pivot falls below
/// tol * max|A|.
LuFactor lu_factor(const Matrix& a, double tol = 1e-14);
Vector lu_solve(const LuFactor& f, std::span<const Complex> b);
Matrix lu_solve(const LuFactor& f, const Matrix& b);

Vector solve(const Matrix& a, std::span<const Complex> b, double tol = 1e-14);
Matrix solve(const Matrix& a, const Matrix& b, double tol = 1e-14);
Matrix inverse(const Matrix& a, double tol = 1e-14);

/// Lower-triangular L with H = L L^dagger; throws NotPositiveDefinite.
Matrix cholesky(const Matrix& h);

struct SingularValues {
  Matrix left;                // U
  std::vector<double> values;  // descending
  Matrix right;               // V, with A = U diag(values) V^dagger
};

/// One-sided Jacobi SVD of a square matrix; small singular values keep
/// accuracy relative to the largest one.
SingularValues svd(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);
/// Operator norm of `a` in the inner product <f, g> = f^dagger H g.
double metric_operator_norm(const Matrix& a, const Matrix& h);
/// sigma_max / sigma_min.
double condition_number(const Matrix& a);

// ---------------------------------------------------------------------------
// Matrix functions.

/// exp(A). Hermitian and skew-Hermitian inputs go through the eigensolver;
/// everything else through scaling and squaring with a [6/6] Pade approximant.
Matrix matrix_exp(const Matrix& a);

/// exp(Q) for Q self-adjoint with respect to the HPD metric H, computed by
/// congruence to the standard product.
Matrix matrix_exp_metric(const Matrix& q, const Matrix& h);

/// Q = ln S for S self-adjoint and positive with respect to H.
/// Factors H = L L^dagger, takes the Hermitian log of L^dagger S L^{-dagger}
/// and maps back. Throws NotMetricSelfAdjoint or NonPositiveSpectrum.
Matrix matrix_log_posdef_metric(const Matrix& s, const Matrix& h, double tol = kDefaultTol);

/// Principal logarithm by inverse scaling and squaring. Throws
/// LogBranchAmbiguity when an eigenvalue lies within `branch_margin` radians
/// of the negative real axis or vanishes.
Matrix principal_log(const Matrix& a, double branch_margin = 0.05);

}  // namespace krein
