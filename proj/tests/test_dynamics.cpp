#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "krein/dynamics.hpp"
#include "krein/models.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

const Complex kI(0.0, 1.0);
const double kPi = std::numbers::pi;

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

DiagonalModel decaying_pair() {
  const std::vector<int> signs = {1, -1};
  const Vector lambdas = {Complex(-0.5, 1.0), Complex(-0.5, 3.0)};
  return diagonal_model(signs, lambdas);
}

Matrix boost_matrix(double t) {
  return Matrix{{std::cosh(t), std::sinh(t)}, {std::sinh(t), std::cosh(t)}};
}

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  return out;
}

// A [.,.]-orthonormal but non-standard basis for signs (+, -): a boost of e1, e2.
Matrix tilted_basis() { return boost_matrix(0.4); }

}  // namespace

TEST(EvolveTest, SpecExamples) {
  const auto model = decaying_pair();
  EXPECT_EQ(evolve(model.spec, 0.0), Matrix::identity(2));

  const auto phases = SemigroupSpec::diagonal(Matrix::identity(2), Vector{kI, 3.0 * kI});
  EXPECT_LE(oracle::max_abs_diff(evolve(phases, kPi), -1.0 * Matrix::identity(2)), 1e-14);

  const Matrix a{{0.0, 1.0}, {1.0, 0.0}};
  const auto boost = SemigroupSpec::from_generator(a);
  EXPECT_LE(oracle::max_abs_diff(evolve(boost, 1.0), oracle::series_exp(a)), 1e-14);
  EXPECT_LE(oracle::max_abs_diff(evolve(boost, 1.0), boost_matrix(1.0)), 1e-14);

  EXPECT_EQ(code_of([&] { evolve(boost, -0.1); }), ErrorCode::NegativeTime);
}

TEST(EvolveTest, NonStandardDiagonalBasis) {
  const Matrix b = tilted_basis();
  const Vector lambdas = {Complex(0.2, 1.0), Complex(-0.7, 0.5)};
  const auto spec = SemigroupSpec::diagonal(b, lambdas);
  const double t = 0.8;
  const Matrix w = evolve(spec, t);
  for (std::size_t k = 0; k < 2; ++k) {
    const Vector f = b.column(k);
    const Vector wf = w * std::span<const Complex>(f);
    EXPECT_LE(norm2(wf - std::exp(lambdas[k] * t) * f), 1e-13);
  }
}

TEST(EvolveTest, SemigroupLaw) {
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> time(0.0, 2.5);
  const std::vector<SemigroupSpec> specs = {
      decaying_pair().spec,
      SemigroupSpec::diagonal(tilted_basis(), Vector{Complex(0.2, 1.0), Complex(-0.7, 0.5)}),
      boost_model().spec,
      SemigroupSpec::from_generator(oracle::random_matrix(rng, 4, 4, 0.5)),
  };
  for (const auto& spec : specs) {
    for (int k = 0; k < 50; ++k) {
      const double t1 = time(rng);
      const double t2 = time(rng);
      const Matrix w1 = evolve(spec, t1);
      const Matrix w2 = evolve(spec, t2);
      EXPECT_LE((evolve(spec, t1 + t2) - w1 * w2).frobenius_norm(),
                1e-8 * w1.frobenius_norm() * w2.frobenius_norm());
    }
  }
}

TEST(FitAlphaTest, DecayingPairGivesMinusOne) {
  const auto model = decaying_pair();
  EXPECT_NEAR(fit_alpha(model.space, model.spec, default_alpha_grid(), 42), -1.0, 1e-8);
}

TEST(FitAlphaTest, FormUnitaryGroupGivesZero) {
  std::mt19937_64 rng(307);
  const auto space = minkowski_space();
  // Generator G^{-1} K with K skew-Hermitian preserves the form.
  const Matrix a = oracle::random_matrix(rng, 4, 4, 0.3);
  Matrix k(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) k(i, j) = 0.5 * (a(i, j) - std::conj(a(j, i)));
  const auto spec = SemigroupSpec::from_generator(space.gram_inverse() * k);
  EXPECT_NEAR(fit_alpha(space, spec, default_alpha_grid(), 42), 0.0, 1e-8);
}

TEST(FitAlphaTest, Errors) {
  const std::vector<int> signs = {1, -1};
  const auto unequal = diagonal_model(signs, Vector{Complex(0.0, 1.0), Complex(-0.5, 1.0)});
  EXPECT_EQ(code_of([&] { fit_alpha(unequal.space, unequal.spec, default_alpha_grid(), 42); }),
            ErrorCode::NotPositiveBijection);
  // theta values that are not exponential in t.
  const std::vector<double> t = {0.5, 1.0, 2.0};
  const std::vector<double> theta = {1.0, 2.0, 3.0};
  EXPECT_GT(fit_exponential_law(t, theta).residual, 0.1);
}

TEST(FitExponentialLawTest, ExactExponential) {
  const auto t = default_alpha_grid();
  std::vector<double> theta;
  for (double s : t) theta.push_back(std::exp(-0.37 * s));
  const auto fit = fit_exponential_law(t, theta);
  EXPECT_NEAR(fit.alpha, -0.37, 1e-14);
  EXPECT_LE(fit.residual, 1e-14);
}

TEST(ThetaAlongFlowTest, Multiplicative) {
  const auto model = decaying_pair();
  std::mt19937_64 rng(311);
  std::uniform_real_distribution<double> time(0.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const double t1 = time(rng);
    const double t2 = time(rng);
    const double th1 = theta_of(model.space, evolve(model.spec, t1), 1).theta;
    const double th2 = theta_of(model.space, evolve(model.spec, t2), 2).theta;
    const double th12 = theta_of(model.space, evolve(model.spec, t1 + t2), 3).theta;
    EXPECT_NEAR(th12, th1 * th2, 1e-8);
  }
}

TEST(NormalizeTest, DecayingPairBecomesPhases) {
  const auto model = decaying_pair();
  const Group group = normalize_to_group(model.space, model.spec, -1.0);
  for (double t : {-2.0, -0.3, 0.0, 0.7, 4.0}) {
    const Matrix u = group.at(t);
    EXPECT_LE(std::abs(u(0, 0) - std::exp(kI * t)), 1e-13);
    EXPECT_LE(std::abs(u(1, 1) - std::exp(3.0 * kI * t)), 1e-13);
    EXPECT_LE(std::abs(u(0, 1)) + std::abs(u(1, 0)), 1e-15);
  }
}

TEST(NormalizeTest, UnitarySpecIsUnchanged) {
  const auto boost = boost_model();
  const Group group = normalize_to_group(boost.space, boost.spec, 0.0);
  EXPECT_LE(oracle::max_abs_diff(group.at(0.9), evolve(boost.spec, 0.9)), 1e-15);
}

TEST(NormalizeTest, PureDecayIsRemoved) {
  const std::vector<int> signs = {1, -1};
  const auto model = diagonal_model(signs, Vector{Complex(1.0, 0.0), Complex(1.0, 0.0)});
  const Group group = normalize_to_group(model.space, model.spec, 2.0);
  EXPECT_LE(oracle::max_abs_diff(group.at(1.5), Matrix::identity(2)), 1e-14);
}

TEST(NormalizeTest, InverseForNegativeTimes) {
  const auto boost = boost_model();
  const Group group = normalize_to_group(boost.space, boost.spec, 0.0);
  EXPECT_LE((group.at(-1.2) * group.at(1.2) - Matrix::identity(2)).max_abs(), 1e-12);
}

TEST(NormalizeTest, WrongAlphaIsRejected) {
  const auto model = decaying_pair();
  EXPECT_EQ(code_of([&] { normalize_to_group(model.space, model.spec, 0.0); }), ErrorCode::UnitarityResidual);
}

TEST(NormalizeTest, GroupPreservesForm) {
  std::mt19937_64 rng(313);
  std::uniform_real_distribution<double> time(-5.0, 5.0);
  const auto pair = decaying_pair();
  const auto boost = boost_model();
  const auto osc = oscillator_group(6, 0.0);
  const std::vector<std::pair<KreinSpace, Group>> models = {
      {pair.space, normalize_to_group(pair.space, pair.spec, -1.0)},
      {boost.space, normalize_to_group(boost.space, boost.spec, 0.0)},
      {osc.space, osc.group},
  };
  for (const auto& [space, group] : models) {
    for (int k = 0; k < 100; ++k) {
      const double t = time(rng);
      const Matrix u = group.at(t);
      const Vector f = oracle::random_vector(rng, space.dim());
      const Vector g = oracle::random_vector(rng, space.dim());
      const Complex before = oracle::bracket(space.gram(), f, g);
      const Complex after = oracle::bracket(space.gram(), u * std::span<const Complex>(f), u * std::span<const Complex>(g));
      EXPECT_LE(std::abs(after - before), 1e-8 * norm2(f) * norm2(g));
    }
  }
}

TEST(EvolvedSymmetryTest, TimeZeroGivesJ) {
  const auto boost = boost_model();
  const Group group(boost.spec, 0.0);
  const auto d = fundamental_decomposition(boost.space);
  EXPECT_LE(oracle::max_abs_diff(evolved_symmetry(d, group, 0.0), d.j), 1e-15);
}

TEST(EvolvedSymmetryTest, BoostClosedForm) {
  const auto boost = boost_model();
  const Group group(boost.spec, 0.0);
  const auto d = fundamental_decomposition(boost.space);
  for (double t : {0.3, 1.0, 2.5}) {
    const Matrix expected{{std::cosh(2 * t), -std::sinh(2 * t)}, {std::sinh(2 * t), -std::cosh(2 * t)}};
    const Matrix j_t = evolved_symmetry(d, group, t);
    EXPECT_LE(oracle::max_abs_diff(j_t, expected), 1e-12 * std::cosh(2 * t));
    EXPECT_LE((j_t * j_t - Matrix::identity(2)).max_abs(), 1e-9 * std::cosh(2 * t));
  }
}

TEST(EvolvedSymmetryTest, OscillatorIsStationary) {
  const auto osc = oscillator_group(8, 0.0);
  const auto d = fundamental_decomposition(osc.space);
  for (double t : grid(-5.0, 5.0, 11))
    EXPECT_LE((evolved_symmetry(d, osc.group, t) - d.j).max_abs(), 1e-12);
}

TEST(EvolvedSymmetryTest, Intertwining) {
  const auto boost = boost_model();
  const Group bgroup(boost.spec, 0.0);
  const auto bd = fundamental_decomposition(boost.space);
  const auto osc = oscillator_group(6, 0.3);
  const auto od = fundamental_decomposition(osc.space);
  for (double t : grid(-5.0, 5.0, 21)) {
    const Matrix ub = bgroup.at(t);
    const Matrix jb = evolved_symmetry(bd, bgroup, t);
    EXPECT_LE((jb * ub - ub * bd.j).max_abs(), 1e-9) << "boost t=" << t;
    const Matrix uo = osc.group.at(t);
    const Matrix jo = evolved_symmetry(od, osc.group, t);
    EXPECT_LE((jo * uo - uo * od.j).max_abs(), 1e-9) << "oscillator t=" << t;
  }
}

TEST(EvolvedSymmetryTest, MatchesEvolvedDecomposition) {
  const auto space = KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}});
  const Group group(SemigroupSpec::from_generator(Matrix{{0.0, 0.4}, {0.4, 0.0}}), 0.0);
  const auto d = fundamental_decomposition(space);
  const auto evolved = evolved_decomposition(space, d, group, 1.3);
  EXPECT_LE((evolved.j - evolved_symmetry(d, group, 1.3)).max_abs(), 1e-12);
}

TEST(UniformBoundTest, OscillatorNormsAreOne) {
  const auto osc = oscillator_group(8, 0.0);
  const auto d = fundamental_decomposition(osc.space);
  const auto t = grid(-5.0, 5.0, 21);
  const auto report = uniform_bound_scan(osc.space, d, osc.group, t);
  EXPECT_TRUE(report.uniformly_bounded);
  for (const auto& row : report.rows) EXPECT_NEAR(row.jt_norm, 1.0, 1e-12);
}

TEST(UniformBoundTest, BoostGrowsExponentially) {
  const auto boost = boost_model();
  const Group group(boost.spec, 0.0);
  const auto d = fundamental_decomposition(boost.space);
  const auto t = grid(0.0, 5.0, 11);
  const auto report = uniform_bound_scan(boost.space, d, group, t);
  EXPECT_FALSE(report.uniformly_bounded);
  for (const auto& row : report.rows)
    if (row.t >= 1.0) EXPECT_NEAR(row.jt_norm / std::exp(2.0 * row.t), 1.0, 0.1);
  EXPECT_NEAR(report.growth_rate, 2.0, 0.2);
}

TEST(UniformBoundTest, SinglePointAtZero) {
  const auto boost = boost_model();
  const auto d = fundamental_decomposition(boost.space);
  const std::vector<double> t = {0.0};
  const auto report = uniform_bound_scan(boost.space, d, Group(boost.spec, 0.0), t);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_NEAR(report.rows[0].jt_norm, 1.0, 1e-14);
  EXPECT_TRUE(report.uniformly_bounded);
}

TEST(QOperatorTest, SameDecompositionGivesZero) {
  const auto d = fundamental_decomposition(minkowski_space());
  EXPECT_LE(q_operator(d, d).q.max_abs(), 1e-12);
}

TEST(QOperatorTest, PauliReferencePoint) {
  const auto m = pauli_family(1.0, kPi / 2.0);
  const auto q = q_operator(m.decomp_l, m.decomp_m);
  EXPECT_LE(oracle::max_abs_diff(q.q, Matrix{{1.0, 0.0}, {0.0, -1.0}}), 1e-9);
}

TEST(QOperatorTest, PauliGenericPoint) {
  const double rho = 0.7;
  const double xi = 1.1;
  const auto m = pauli_family(rho, xi);
  const Matrix expected{{rho * std::sin(xi), -kI * rho * std::cos(xi)}, {kI * rho * std::cos(xi), -rho * std::sin(xi)}};
  const auto q = q_operator(m.decomp_l, m.decomp_m);
  EXPECT_LE((q.q - expected).frobenius_norm(), 1e-9);
  EXPECT_LE(q.exp_residual, 1e-9);
  EXPECT_LE(q.inverse_residual, 1e-9);
  EXPECT_LE(q.anticommutation_residual, 1e-9);
}

TEST(FactorizeTest, TimeZero) {
  const auto boost = boost_model();
  const auto d = fundamental_decomposition(boost.space);
  const auto f = factorize_unitary(boost.space, d, Group(boost.spec, 0.0), 0.0);
  EXPECT_LE(f.q_t.max_abs(), 1e-14);
  EXPECT_LE((f.y_t - Matrix::identity(2)).max_abs(), 1e-14);
}

TEST(FactorizeTest, OscillatorHasNoQ) {
  const auto osc = oscillator_group(6, 0.0);
  const auto d = fundamental_decomposition(osc.space);
  for (double t : {-3.0, 0.4, 2.2}) {
    const auto f = factorize_unitary(osc.space, d, osc.group, t);
    EXPECT_LE(f.q_t.max_abs(), 1e-12);
    EXPECT_LE((f.y_t - osc.group.at(t)).max_abs(), 1e-12);
  }
}

TEST(FactorizeTest, BoostAtHalf) {
  const auto boost = boost_model();
  const Group group(boost.spec, 0.0);
  const auto d = fundamental_decomposition(boost.space);
  const double t = 0.5;
  const auto f = factorize_unitary(boost.space, d, group, t);
  // J J_t for the closed-form J_t.
  const Matrix jj{{std::cosh(2 * t), -std::sinh(2 * t)}, {-std::sinh(2 * t), std::cosh(2 * t)}};
  EXPECT_LE(oracle::max_abs_diff(oracle::series_exp(f.q_t), jj), 1e-9);
  EXPECT_LE(f.reconstruction_residual, 1e-9);
  EXPECT_LE(f.unitarity_residual, 1e-9);
  EXPECT_LE(f.commutation_residual, 1e-9);
  EXPECT_LE(f.q_anticommutation_residual, 1e-9);
  EXPECT_LE(f.norm_identity_residual, 1e-9);
  // Independent check of e^{-Q/2} Y = U.
  const Matrix half = oracle::series_exp(-0.5 * f.q_t);
  EXPECT_LE(oracle::max_abs_diff(oracle::mul(half, f.y_t), group.at(t)), 1e-9);
}

TEST(FactorizeTest, ResidualsAcrossTheGrid) {
  const auto boost = boost_model();
  const Group bgroup(boost.spec, 0.0);
  const auto bd = fundamental_decomposition(boost.space);
  const auto osc = oscillator_group(8, 0.0);
  const auto od = fundamental_decomposition(osc.space);
  for (double t : grid(-5.0, 5.0, 20)) {
    for (const auto& f : {factorize_unitary(boost.space, bd, bgroup, t),
                          factorize_unitary(osc.space, od, osc.group, t)}) {
      EXPECT_LE(f.reconstruction_residual, 1e-8) << t;
      EXPECT_LE(f.unitarity_residual, 1e-8) << t;
      EXPECT_LE(f.commutation_residual, 1e-8) << t;
      EXPECT_LE(f.norm_identity_residual, 1e-8) << t;
    }
  }
}

TEST(InvariantDecompositionTest, OscillatorIsParitySplit) {
  const auto osc = oscillator_group(8, 0.0);
  const auto m = invariant_decomposition(osc.space, osc.group);
  const auto l = fundamental_decomposition(osc.space);
  EXPECT_LE((m.j - l.j).max_abs(), 1e-10);
  EXPECT_LE(invariance_residual(m, osc.group), 1e-8);
}

TEST(InvariantDecompositionTest, DiagonalPhases) {
  const auto model = decaying_pair();
  const Group group = normalize_to_group(model.space, model.spec, -1.0);
  const auto m = invariant_decomposition(model.space, group);
  EXPECT_LE(oracle::max_abs_diff(m.j, Matrix{{1.0, 0.0}, {0.0, -1.0}}), 1e-12);
}

TEST(InvariantDecompositionTest, GeneratorFormFindsInvariantSplit) {
  // Generator i diag(1, 2, 3) conjugated by a form-preserving tilt.
  const KreinSpace space(Matrix::diagonal(std::vector<double>{1.0, -1.0, 1.0}));
  const Matrix t{{std::cosh(0.3), std::sinh(0.3), 0.0}, {std::sinh(0.3), std::cosh(0.3), 0.0}, {0.0, 0.0, 1.0}};
  const Matrix a = t * Matrix::diagonal(Vector{kI, 2.0 * kI, 3.0 * kI}) * inverse(t);
  const Group group(SemigroupSpec::from_generator(a), 0.0);
  const auto m = invariant_decomposition(space, group);
  EXPECT_LE(invariance_residual(m, group), 1e-8);
  for (double s : {-2.0, 0.5, 3.0}) {
    const Matrix u = group.at(s);
    EXPECT_LE((m.projector_minus() * u * m.projector_plus()).max_abs(), 1e-8);
    EXPECT_LE((m.projector_plus() * u * m.projector_minus()).max_abs(), 1e-8);
  }
}

TEST(InvariantDecompositionTest, BoostHasNeutralEigenvectors) {
  const auto boost = boost_model();
  const Group group(boost.spec, 0.0);
  EXPECT_EQ(code_of([&] { invariant_decomposition(boost.space, group); }), ErrorCode::NeutralEigenvector);
}

TEST(InvariantDecompositionTest, JordanGeneratorIsNotDiagonalizable) {
  const KreinSpace space(Matrix{{0.0, 1.0}, {1.0, 0.0}});
  // Skew-adjoint in the sigma_1 form but nilpotent.
  const Group group(SemigroupSpec::from_generator(Matrix{{0.0, kI}, {0.0, 0.0}}), 0.0);
  EXPECT_EQ(code_of([&] { invariant_decomposition(space, group); }), ErrorCode::NotDiagonalizable);
}

TEST(GeneratorTest, OscillatorSpectrum) {
  const auto osc = oscillator_group(6, 0.0);
  const auto g = generator(osc.space, osc.group);
  for (std::size_t n = 0; n < 6; ++n) {
    EXPECT_LE(std::abs(g.a(n, n) - kI * (2.0 * n + 1.0)), 1e-8);
  }
  EXPECT_LE(g.reproduction_residual, 1e-8);
  ASSERT_TRUE(g.self_adjoint_residual.has_value());
  EXPECT_LE(*g.self_adjoint_residual, 1e-9);
}

TEST(GeneratorTest, IdentityGroup) {
  const Group group(SemigroupSpec::from_generator(Matrix::zeros(2, 2)), 0.0);
  const auto g = generator(KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}}), group);
  EXPECT_LE(g.a.max_abs(), 1e-12);
}

TEST(GeneratorTest, ShiftedOscillatorEigenvalues) {
  const double a = 0.3;
  const auto osc = oscillator_group(6, a);
  const auto g = generator(osc.space, osc.group);
  const auto eig = general_eig(g.a);
  std::vector<double> imag;
  for (const auto& l : eig.eigenvalues) {
    EXPECT_LE(std::abs(l.real()), 1e-8);
    imag.push_back(l.imag());
  }
  std::sort(imag.begin(), imag.end());
  for (std::size_t n = 0; n < 6; ++n) EXPECT_NEAR(imag[n], 2.0 * n + 1.0 + a * a, 1e-8);
}

TEST(GeneratorTest, BranchCutIsReported) {
  const Group group(SemigroupSpec::diagonal(Matrix::identity(2), Vector{kI * kPi, 0.0}), 0.0);
  EXPECT_EQ(code_of([&] { generator(KreinSpace(Matrix{{1.0, 0.0}, {0.0, -1.0}}), group, 1.0); }),
            ErrorCode::LogBranchAmbiguity);
}

TEST(LineSpectrumTest, SpecExamples) {
  const auto on = line_spectrum_check(decaying_pair().spec);
  EXPECT_TRUE(on.on_line);
  EXPECT_NEAR(on.real_part, -0.5, 1e-15);
  const auto off = line_spectrum_check(SemigroupSpec::diagonal(Matrix::identity(2), Vector{Complex(1, 1), Complex(2, 1)}));
  EXPECT_FALSE(off.on_line);
  const auto osc = line_spectrum_check(oscillator_group(6, 0.0).group.spec());
  EXPECT_TRUE(osc.on_line);
  EXPECT_NEAR(osc.real_part, 0.0, 1e-15);
  EXPECT_EQ(code_of([] { line_spectrum_check(SemigroupSpec::from_generator(Matrix{{0.0, 1.0}, {0.0, 0.0}})); }),
            ErrorCode::NotDiagonalizable);
}
