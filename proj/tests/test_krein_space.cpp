#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "krein/krein_space.hpp"
#include "krein/models.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

const Complex kI(0.0, 1.0);

Matrix sigma1() { return Matrix{{0.0, 1.0}, {1.0, 0.0}}; }

KreinSpace pauli_space() { return KreinSpace(sigma1()); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no krein::Error thrown";
  return ErrorCode::InvalidArgument;
}

std::vector<KreinSpace> random_spaces(std::mt19937_64& rng) {
  std::vector<KreinSpace> spaces;
  for (std::size_t n = 2; n <= 8; ++n)
    for (std::size_t p = 1; p < n; p += 2) spaces.emplace_back(oracle::random_gram(rng, p, n - p));
  return spaces;
}

}  // namespace

TEST(KreinSpaceTest, SignatureAndValidation) {
  EXPECT_EQ(minkowski_space().signature(), (Signature{1, 3}));
  EXPECT_EQ(pauli_space().signature(), (Signature{1, 1}));
  EXPECT_EQ(code_of([] { KreinSpace(Matrix{{1.0, 2.0}, {0.0, -1.0}}); }), ErrorCode::NotHermitian);
  EXPECT_EQ(code_of([] { KreinSpace(Matrix{{1.0, 0.0}, {0.0, 0.0}}); }), ErrorCode::DegenerateSpace);
  EXPECT_EQ(code_of([] { KreinSpace(Matrix::identity(3)); }), ErrorCode::NotIndefinite);
}

TEST(IndefiniteInnerTest, SpecExamples) {
  const Vector f = {2.0, 1.0, 0.0, 0.0};
  EXPECT_EQ(indefinite_inner(minkowski_space(), f, f), Complex(3.0));
  EXPECT_EQ(indefinite_inner(pauli_space(), Vector{1.0, 0.0}, Vector{0.0, 1.0}), Complex(1.0));
  EXPECT_EQ(indefinite_inner(pauli_space(), Vector{0.0, 0.0}, Vector{kI, 3.0}), Complex(0.0));
  EXPECT_EQ(code_of([] { indefinite_inner(pauli_space(), Vector{1.0}, Vector{1.0, 0.0}); }),
            ErrorCode::DimensionMismatch);
}

TEST(IndefiniteInnerTest, SesquilinearAgainstBruteForce) {
  std::mt19937_64 rng(101);
  for (const auto& space : random_spaces(rng)) {
    const std::size_t n = space.dim();
    const Vector f = oracle::random_vector(rng, n);
    const Vector g = oracle::random_vector(rng, n);
    const Complex fg = indefinite_inner(space, f, g);
    EXPECT_LE(std::abs(fg - oracle::bracket(space.gram(), f, g)), 1e-12 * (1.0 + std::abs(fg)));
    EXPECT_LE(std::abs(fg - std::conj(indefinite_inner(space, g, f))), 1e-12 * (1.0 + std::abs(fg)));
    // Conjugate-linear in the first slot, linear in the second.
    const Complex s(0.3, -1.7);
    EXPECT_LE(std::abs(indefinite_inner(space, f, s * g) - s * fg), 1e-12 * (1.0 + std::abs(fg)));
    EXPECT_LE(std::abs(indefinite_inner(space, s * f, g) - std::conj(s) * fg), 1e-12 * (1.0 + std::abs(fg)));
  }
}

TEST(ClassifyVectorTest, SpecExamples) {
  const auto pos = classify_vector(minkowski_space(), Vector{2.0, 1.0, 0.0, 0.0});
  EXPECT_EQ(pos.kind, VectorKind::Positive);
  EXPECT_DOUBLE_EQ(pos.value, 3.0);
  EXPECT_EQ(classify_vector(minkowski_space(), Vector{1.0, 1.0, 0.0, 0.0}).kind, VectorKind::Neutral);
  const auto neg = classify_vector(pauli_space(), Vector{1.0, -1.0});
  EXPECT_EQ(neg.kind, VectorKind::Negative);
  EXPECT_DOUBLE_EQ(neg.value, -2.0);
  EXPECT_EQ(classify_vector(pauli_space(), Vector{0.0, 0.0}).kind, VectorKind::Neutral);
}

TEST(ClassifyVectorTest, NeutralBandScalesWithNorm) {
  // [f, f] = 1e-12 * ||f||^2 is inside the 1e-9 band, 1e-6 is outside.
  const double big = 1e6;
  const Vector f = {big, big * (1.0 - 1e-12)};
  EXPECT_EQ(classify_vector(KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}}), f).kind, VectorKind::Neutral);
  const Vector g = {big, big * (1.0 - 1e-6)};
  EXPECT_EQ(classify_vector(KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}}), g).kind, VectorKind::Positive);
}

TEST(QuotientTest, DropsExplicitKernel) {
  const Quotient q = quotient_degenerate(Matrix{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0}});
  EXPECT_EQ(q.space.dim(), 2u);
  EXPECT_LE(oracle::max_abs_diff(q.space.gram(), Matrix{{1.0, 0.0}, {0.0, -1.0}}), 1e-15);
  ASSERT_EQ(q.projection.rows(), 2u);
  ASSERT_EQ(q.projection.cols(), 3u);
  EXPECT_NEAR(std::abs(q.projection(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(q.projection(1, 1)), 1.0, 1e-15);
  EXPECT_EQ(q.projection(0, 2), Complex(0.0));
  EXPECT_EQ(q.projection(1, 2), Complex(0.0));
}

TEST(QuotientTest, NondegenerateIsUnchanged) {
  const Quotient q = quotient_degenerate(Matrix{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_EQ(q.space.gram(), (Matrix{{1.0, 0.0}, {0.0, -1.0}}));
  EXPECT_EQ(q.projection, Matrix::identity(2));
}

TEST(QuotientTest, RandomCongruencePreservesForm) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix t = oracle::random_matrix(rng, 4, 4);
    const Matrix g = oracle::mul(oracle::mul(t.adjoint(), Matrix{{1.0, 0, 0, 0}, {0, -1.0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}), t);
    Matrix herm = g;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) herm(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    const Quotient q = quotient_degenerate(herm);
    EXPECT_EQ(q.space.signature(), (Signature{1, 1}));
    // [f, g] = [P f, P g] on the quotient.
    for (int k = 0; k < 5; ++k) {
      const Vector f = oracle::random_vector(rng, 4);
      const Vector h = oracle::random_vector(rng, 4);
      const Complex direct = oracle::bracket(herm, f, h);
      const Vector pf = q.projection * std::span<const Complex>(f);
      const Vector ph = q.projection * std::span<const Complex>(h);
      EXPECT_LE(std::abs(direct - oracle::bracket(q.space.gram(), pf, ph)), 1e-9 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(QuotientTest, Errors) {
  EXPECT_EQ(code_of([] { quotient_degenerate(Matrix::zeros(3, 3)); }), ErrorCode::EverythingIsotropic);
  EXPECT_EQ(code_of([] { quotient_degenerate(Matrix{{1.0, 0.0}, {0.0, 0.0}}); }), ErrorCode::NotIndefinite);
}

TEST(FundamentalDecompositionTest, DiagonalGram) {
  const auto d = fundamental_decomposition(KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}}));
  EXPECT_LE(oracle::max_abs_diff(d.j, Matrix{{1.0, 0.0}, {0.0, -1.0}}), 1e-15);
  EXPECT_NEAR(std::abs(d.basis_plus(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(d.basis_minus(1, 0)), 1.0, 1e-15);
}

TEST(FundamentalDecompositionTest, PauliGivesSigma1) {
  const auto d = fundamental_decomposition(pauli_space());
  EXPECT_LE(oracle::max_abs_diff(d.j, sigma1()), 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  // Spans, checked up to phase.
  EXPECT_NEAR(std::abs(d.basis_plus(0, 0)), r, 1e-14);
  EXPECT_LE(std::abs(d.basis_plus(0, 0) - d.basis_plus(1, 0)), 1e-14);
  EXPECT_NEAR(std::abs(d.basis_minus(0, 0)), r, 1e-14);
  EXPECT_LE(std::abs(d.basis_minus(0, 0) + d.basis_minus(1, 0)), 1e-14);
}

TEST(FundamentalDecompositionTest, MinkowskiSymmetry) {
  const auto space = minkowski_space();
  const auto d = fundamental_decomposition(space);
  EXPECT_LE(oracle::max_abs_diff(d.j, Matrix::diagonal(std::vector<double>{1.0, -1.0, -1.0, -1.0})), 1e-15);
  std::mt19937_64 rng(107);
  for (int k = 0; k < 20; ++k) {
    const Vector f = oracle::random_vector(rng, 4);
    const Vector g = oracle::random_vector(rng, 4);
    const Vector jf = d.j * std::span<const Complex>(f);
    const Vector jg = d.j * std::span<const Complex>(g);
    EXPECT_LE(std::abs(oracle::bracket(space.gram(), jf, g) - oracle::bracket(space.gram(), f, jg)), 1e-13);
  }
}

TEST(FundamentalDecompositionTest, InvariantsOnRandomSpaces) {
  std::mt19937_64 rng(109);
  for (const auto& space : random_spaces(rng)) {
    const auto d = fundamental_decomposition(space);
    const auto a = audit(d);
    EXPECT_LE(a.involution, 1e-9);
    EXPECT_LE(a.self_adjoint, 1e-9);
    EXPECT_LE(a.cross_orthogonal, 1e-9);
    EXPECT_GT(a.metric_min_eig, 0.0);
    EXPECT_EQ(d.basis_plus.cols(), space.signature().positive);
    EXPECT_EQ(d.basis_minus.cols(), space.signature().negative);
    // [.,.]-orthonormal bases.
    const Matrix gp = gram_block(space.gram(), d.basis_plus, d.basis_plus);
    const Matrix gm = gram_block(space.gram(), d.basis_minus, d.basis_minus);
    EXPECT_LE((gp - Matrix::identity(gp.rows())).max_abs(), 1e-10);
    EXPECT_LE((gm + Matrix::identity(gm.rows())).max_abs(), 1e-10);
  }
}

TEST(FundamentalDecompositionTest, DefiniteNormDominatesIndefiniteForm) {
  std::mt19937_64 rng(113);
  for (const auto& space : random_spaces(rng)) {
    const auto d = fundamental_decomposition(space);
    for (int k = 0; k < 1000; ++k) {
      const Vector f = oracle::random_vector(rng, space.dim());
      const double definite = definite_inner(d, f, f).real();
      const double indefinite = indefinite_inner(space, f, f).real();
      ASSERT_GE(definite, std::abs(indefinite) - 1e-9);
      ASSERT_GT(definite, 0.0);
    }
  }
}

TEST(FundamentalDecompositionTest, ProjectedPartsHaveTheRightSign) {
  std::mt19937_64 rng(127);
  for (const auto& space : random_spaces(rng)) {
    const auto d = fundamental_decomposition(space);
    const Matrix pp = d.projector_plus();
    const Matrix pm = d.projector_minus();
    for (int k = 0; k < 50; ++k) {
      const Vector f = oracle::random_vector(rng, space.dim());
      const Vector fp = pp * std::span<const Complex>(f);
      const Vector fm = pm * std::span<const Complex>(f);
      EXPECT_LE(norm2(fp + fm - f), 1e-12 * norm2(f));
      EXPECT_EQ(classify_vector(space, fp).kind, VectorKind::Positive);
      EXPECT_EQ(classify_vector(space, fm).kind, VectorKind::Negative);
      // J acts as +1 on L+ and -1 on L-.
      EXPECT_EQ(classify_vector(space, d.j * std::span<const Complex>(fp)).kind, VectorKind::Positive);
      EXPECT_EQ(classify_vector(space, d.j * std::span<const Complex>(fm)).kind, VectorKind::Negative);
    }
  }
}

TEST(DecompositionFromBasesTest, PauliNonCanonical) {
  const double e = std::numbers::e;
  const auto d = decomposition_from_bases(pauli_space(), Matrix{{1.0}, {e}}, Matrix{{1.0}, {-e}});
  EXPECT_LE(oracle::max_abs_diff(d.j, Matrix{{0.0, 1.0 / e}, {e, 0.0}}), 1e-14);
  EXPECT_LE((d.j * d.j - Matrix::identity(2)).max_abs(), 1e-14);
}

TEST(DecompositionFromBasesTest, CanonicalRoundTrip) {
  std::mt19937_64 rng(131);
  for (const auto& space : random_spaces(rng)) {
    const auto d = fundamental_decomposition(space);
    const auto again = decomposition_from_bases(space, d.basis_plus, d.basis_minus);
    EXPECT_LE((again.j - d.j).max_abs(), 1e-10);
  }
}

TEST(DecompositionFromBasesTest, Errors) {
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_EQ(code_of([&] { decomposition_from_bases(pauli_space(), Matrix{{r}, {-r}}, Matrix{{r}, {-r}}); }),
            ErrorCode::NotPositiveSubspace);
  EXPECT_EQ(code_of([&] { decomposition_from_bases(pauli_space(), Matrix{{r}, {r}}, Matrix{{r}, {r}}); }),
            ErrorCode::NotNegativeSubspace);
  const auto space = KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_EQ(code_of([&] { decomposition_from_bases(space, Matrix{{1.0}, {0.0}}, Matrix{{0.5}, {1.0}}); }),
            ErrorCode::NotOrthogonal);
  EXPECT_EQ(code_of([&] { decomposition_from_bases(minkowski_space(), Matrix{{1.0}, {0.0}, {0.0}, {0.0}},
                                                   Matrix{{0.0}, {1.0}, {0.0}, {0.0}}); }),
            ErrorCode::WrongDimensions);
}

TEST(DefiniteInnerTest, SpecExamples) {
  const auto d = fundamental_decomposition(pauli_space());
  EXPECT_LE(std::abs(definite_inner(d, Vector{1.0, 0.0}, Vector{1.0, 0.0}) - 1.0), 1e-14);
  EXPECT_LE(std::abs(definite_inner(d, Vector{1.0, 1.0}, Vector{1.0, -1.0})), 1e-14);
  // Pauli metric is the standard product.
  const Vector f = {Complex(1.0, 2.0), Complex(-0.5, 0.25)};
  const Vector g = {Complex(0.3, -1.0), Complex(2.0, 1.0)};
  EXPECT_LE(std::abs(definite_inner(d, f, g) - dot(f, g)), 1e-14);

  const auto dm = fundamental_decomposition(minkowski_space());
  std::mt19937_64 rng(137);
  for (int k = 0; k < 20; ++k) {
    const Vector h = oracle::random_vector(rng, 4);
    double direct = 0.0;
    for (const auto& z : h) direct += std::norm(z);
    EXPECT_NEAR(definite_inner(dm, h, h).real(), direct, 1e-12 * direct);
  }
}

TEST(KreinAdjointTest, SpecExamples) {
  const KreinSpace space(Matrix{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_LE(oracle::max_abs_diff(krein_adjoint(space, Matrix{{0.0, 1.0}, {0.0, 0.0}}),
                                 Matrix{{0.0, 0.0}, {-1.0, 0.0}}),
            1e-15);
  const double t = 0.8;
  const Matrix boost{{std::cosh(t), std::sinh(t)}, {std::sinh(t), std::cosh(t)}};
  const Matrix boost_inv{{std::cosh(t), -std::sinh(t)}, {-std::sinh(t), std::cosh(t)}};
  EXPECT_LE(oracle::max_abs_diff(krein_adjoint(space, boost), boost_inv), 1e-14);
}

TEST(KreinAdjointTest, SymmetryIsSelfAdjoint) {
  std::mt19937_64 rng(139);
  for (const auto& space : random_spaces(rng)) {
    const auto d = fundamental_decomposition(space);
    EXPECT_LE((krein_adjoint(space, d.j) - d.j).max_abs(), 1e-9);
  }
}

TEST(KreinAdjointTest, DefiningIdentityAndInvolution) {
  std::mt19937_64 rng(149);
  for (const auto& space : random_spaces(rng)) {
    const std::size_t n = space.dim();
    const Matrix w = oracle::random_matrix(rng, n, n);
    const Matrix ws = krein_adjoint(space, w);
    EXPECT_LE((krein_adjoint(space, ws) - w).max_abs(), 1e-10 * (1.0 + w.max_abs()));
    const Vector f = oracle::random_vector(rng, n);
    const Vector g = oracle::random_vector(rng, n);
    const Complex lhs = oracle::bracket(space.gram(), w * std::span<const Complex>(f), g);
    const Complex rhs = oracle::bracket(space.gram(), f, ws * std::span<const Complex>(g));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST(KreinAdjointTest, FormUnitaryHasAdjointInverse) {
  std::mt19937_64 rng(151);
  for (const auto& space : random_spaces(rng)) {
    const Matrix u = oracle::random_gram_unitary(rng, space);
    const double scale = u.frobenius_norm() * u.frobenius_norm();
    EXPECT_LE((krein_adjoint(space, u) * u - Matrix::identity(space.dim())).max_abs(), 1e-12 * scale);
  }
}
