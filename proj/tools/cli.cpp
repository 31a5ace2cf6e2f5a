#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krein/io.hpp"
#include "krein/models.hpp"

namespace krein::cli {
namespace {

// Input and configuration problems; mapped to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kPi = std::numbers::pi;

struct RunConfig {
  std::string command;
  std::string fixture;
  std::string in_path;
  std::string out_path;
  std::string format = "json";
  double tol = kDefaultTol;
  std::uint64_t seed = 42;
  double t_start = -5.0;
  double t_stop = 5.0;
  std::size_t t_count = 21;
  double rho = 1.0;
  double xi = kPi / 2.0;
  std::optional<double> shift;
  std::size_t count = 6;
  std::string signs = "+,-";
  std::string lambdas = "-0.5+i,-0.5+3i";
  std::vector<std::string> vectors;
  std::string diag;
  bool expect_unitary = false;
  std::string dump;
};

struct Record {
  std::string name;
  std::string status;  // pass | fail | error
  Json values;
  std::optional<double> tolerance;
};

struct Report {
  std::vector<Record> records;
  Json extra = Json::object();
  std::optional<FlowReport> flow;

  bool passed() const {
    return std::all_of(records.begin(), records.end(), [](const Record& r) { return r.status == "pass"; });
  }

  void add(std::string name, bool ok, Json values, std::optional<double> tolerance = std::nullopt) {
    records.push_back({std::move(name), ok ? "pass" : "fail", std::move(values), tolerance});
  }

  /// Passes iff measured <= tolerance.
  void residual(std::string name, double measured, double tolerance, Json values = Json::object()) {
    values["measured"] = measured;
    add(std::move(name), measured <= tolerance, std::move(values), tolerance);
  }

  void error(std::string name, const Error& e) {
    records.push_back({std::move(name), "error",
                       Json{{"error", to_string(e.code())}, {"message", e.what()}}, std::nullopt});
  }

  /// Runs `body`; a thrown krein::Error becomes an error record.
  template <class F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      error(name, e);
    }
  }

  /// Passes iff `body` throws a krein::Error with `expected` code.
  template <class F>
  void expect_error(std::string name, ErrorCode expected, F&& body) {
    try {
      body();
      add(std::move(name), false, Json{{"expected", to_string(expected)}, {"raised", nullptr}});
    } catch (const Error& e) {
      add(std::move(name), e.code() == expected,
          Json{{"expected", to_string(expected)}, {"raised", to_string(e.code())}});
    }
  }
};

// ---------------------------------------------------------------------------
// Parsing helpers.

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

Vector parse_vector(const std::string& text) {
  Vector out;
  for (const auto& token : split_list(text)) out.push_back(parse_complex(token));
  if (out.empty()) throw InputError("empty vector");
  return out;
}

std::vector<int> parse_signs(const std::string& text) {
  std::vector<int> out;
  for (const auto& token : split_list(text)) {
    if (token == "+" || token == "+1" || token == "1") out.push_back(1);
    else if (token == "-" || token == "-1") out.push_back(-1);
    else throw InputError("signs must be + or -, got '" + token + "'");
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<double> time_grid(const RunConfig& cfg) {
  if (cfg.t_count == 0) throw InputError("--t-count must be at least 1");
  if (cfg.t_count == 1) return {cfg.t_start};
  std::vector<double> out;
  for (std::size_t k = 0; k < cfg.t_count; ++k)
    out.push_back(cfg.t_start + (cfg.t_stop - cfg.t_start) * static_cast<double>(k) /
                                    static_cast<double>(cfg.t_count - 1));
  return out;
}

double shift_of(const RunConfig& cfg) {
  if (cfg.shift) return *cfg.shift;
  return cfg.fixture == "shifted" ? 0.3 : 0.0;
}

Json config_echo(const RunConfig& cfg) {
  Json j;
  j["fixture"] = cfg.fixture.empty() ? Json(nullptr) : Json(cfg.fixture);
  j["in"] = cfg.in_path.empty() ? Json(nullptr) : Json(cfg.in_path);
  j["format"] = cfg.format;
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  j["t_grid"] = Json{{"start", cfg.t_start}, {"stop", cfg.t_stop}, {"count", cfg.t_count}};
  j["rho"] = cfg.rho;
  j["xi"] = cfg.xi;
  j["a"] = shift_of(cfg);
  j["n"] = cfg.count;
  j["signs"] = cfg.signs;
  j["lambdas"] = cfg.lambdas;
  j["vectors"] = cfg.vectors;
  j["diag"] = cfg.diag;
  j["expect_unitary"] = cfg.expect_unitary;
  return j;
}

// ---------------------------------------------------------------------------
// Inputs.

const std::vector<std::string> kFixtures = {"minkowski", "pauli",   "diagonal", "dilation",
                                            "oscillator", "shifted", "boost"};

KreinSpace with_tol(const KreinSpace& space, double tol) { return KreinSpace(space.gram(), tol); }

KreinSpace fixture_space(const RunConfig& cfg) {
  const std::string& f = cfg.fixture;
  if (f == "minkowski") return with_tol(minkowski_space(), cfg.tol);
  if (f == "pauli") return with_tol(pauli_family(cfg.rho, cfg.xi).space, cfg.tol);
  if (f == "diagonal") {
    const auto signs = parse_signs(cfg.signs);
    const Vector lambdas(signs.size(), Complex(0.0));
    return with_tol(diagonal_model(signs, lambdas).space, cfg.tol);
  }
  if (f == "boost") return with_tol(boost_model().space, cfg.tol);
  if (f == "oscillator" || f == "shifted") return with_tol(hermite_coordinate_space(cfg.count), cfg.tol);
  throw InputError("fixture '" + f + "' has no finite-dimensional space for this command");
}

struct Inputs {
  std::optional<KreinSpace> space;
  std::vector<Vector> vectors;
  std::optional<Matrix> op;
  std::optional<SemigroupSpec> spec;
};

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  if (!cfg.in_path.empty()) {
    const Json j = read_json_file(cfg.in_path);
    if (!j.is_object()) throw InputError("input file must hold a JSON object");
    if (j.contains("space")) {
      Json s = j.at("space");
      if (!s.contains("tol")) s["tol"] = cfg.tol;
      in.space = space_from_json(s);
    }
    if (j.contains("vectors")) {
      if (!j.at("vectors").is_array()) throw InputError("\"vectors\" must be an array");
      for (const auto& v : j.at("vectors")) in.vectors.push_back(vector_from_json(v));
    }
    if (j.contains("operator")) in.op = matrix_from_json(j.at("operator"));
    if (j.contains("spec")) in.spec = spec_from_json(j.at("spec"));
  } else {
    in.space = fixture_space(cfg);
  }
  for (const auto& v : cfg.vectors) in.vectors.push_back(parse_vector(v));
  if (!cfg.diag.empty()) in.op = Matrix::diagonal(std::span<const Complex>(parse_vector(cfg.diag)));

  if (!in.space) throw InputError("no space given");
  for (const auto& v : in.vectors)
    if (v.size() != in.space->dim()) throw InputError("vector length differs from space dimension");
  if (in.op && (!in.op->is_square() || in.op->rows() != in.space->dim()))
    throw InputError("operator must be square with the space dimension");
  return in;
}

SemigroupSpec fixture_spec(const RunConfig& cfg) {
  const std::string& f = cfg.fixture;
  if (f == "diagonal") {
    const auto signs = parse_signs(cfg.signs);
    return diagonal_model(signs, parse_vector(cfg.lambdas)).spec;
  }
  if (f == "oscillator" || f == "shifted") return oscillator_group(cfg.count, shift_of(cfg)).group.spec();
  if (f == "boost") return boost_model().spec;
  throw InputError("fixture '" + f + "' has no semigroup for the flow command");
}

// ---------------------------------------------------------------------------
// Shared check fragments.

Vector sorted_by_imag(Vector v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return v;
}

double max_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Matrix signed_identity(std::size_t n) {
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = k % 2 == 0 ? 1.0 : -1.0;
  return Matrix::diagonal(std::span<const double>(d));
}

Vector oscillator_eigenvalues(std::size_t count, double a) {
  Vector out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = Complex(0.0, 2.0 * static_cast<double>(n) + 1.0 + a * a);
  return out;
}

void generator_records(Report& r, const KreinSpace& space, const Group& group,
                       const std::optional<Vector>& expected) {
  r.guarded("generator", [&] {
    const auto est = generator(space, group);
    const Vector eig = sorted_by_imag(general_eig(est.a).eigenvalues);
    Json values{{"eigenvalues", to_json(eig)},
                {"reproduction_residual", est.reproduction_residual},
                {"self_adjoint_residual",
                 est.self_adjoint_residual ? Json(*est.self_adjoint_residual) : Json(nullptr)}};
    if (expected) {
      r.residual("generator_spectrum", max_distance(eig, sorted_by_imag(*expected)), 1e-8, values);
    } else {
      r.residual("generator_spectrum", est.reproduction_residual, 1e-8, values);
    }
  });
}

// ---------------------------------------------------------------------------
// Commands.

void cmd_classify(const RunConfig& cfg, Report& r) {
  const Inputs in = load_inputs(cfg);
  if (in.vectors.empty()) throw InputError("classify needs at least one vector");
  for (std::size_t k = 0; k < in.vectors.size(); ++k) {
    const auto cls = classify_vector(*in.space, in.vectors[k]);
    r.add("vector_" + std::to_string(k), true,
          Json{{"vector", to_json(in.vectors[k])},
               {"class", to_string(cls.kind)},
               {"self_product", cls.value}},
          in.space->tol());
  }
}

void cmd_theta(const RunConfig& cfg, Report& r) {
  const Inputs in = load_inputs(cfg);
  if (!in.op) throw InputError("theta needs an operator (--diag or \"operator\" in --in)");
  const ThetaReport theta = theta_of(*in.space, *in.op, cfg.seed);
  Json values = to_json(theta);
  if (theta.invertible) {
    const auto cert = positive_bijection_certificate(*in.space, *in.op, cfg.seed);
    values["bijection_certified"] = cert.certified;
    values["sampled_cone_preserved"] = cert.sampled_cone_preserved;
    values["checks_agree"] = cert.checks_agree;
  } else {
    values["bijection_certified"] = false;
  }
  r.add("theta", !cfg.expect_unitary || theta.is_scaled_unitary, values, in.space->tol());
}

void cmd_extend(const RunConfig& cfg, Report& r) {
  const Inputs in = load_inputs(cfg);
  if (!in.op) throw InputError("extend needs an operator (--diag or \"operator\" in --in)");
  if (in.vectors.empty()) throw InputError("extend needs at least one vector");
  const PartialOperator op = restrict_to_positive_cone(*in.space, *in.op);
  for (std::size_t k = 0; k < in.vectors.size(); ++k) {
    const std::string name = "extension_" + std::to_string(k);
    r.guarded(name, [&] {
      const auto ext = extend_operator(*in.space, op, in.vectors[k]);
      const Vector direct = *in.op * std::span<const Complex>(in.vectors[k]);
      const double err = norm2(ext.value - direct) / (norm2(direct) + 1.0);
      r.residual(name, err, in.space->tol(),
                 Json{{"value", to_json(ext.value)}, {"audit_spread", ext.audit_spread}});
    });
  }
}

void cmd_flow(const RunConfig& cfg, Report& r) {
  std::optional<KreinSpace> space;
  std::optional<SemigroupSpec> spec;
  if (!cfg.in_path.empty()) {
    Inputs in = load_inputs(cfg);
    if (!in.spec) throw InputError("flow needs a \"spec\" in the input file");
    space = std::move(in.space);
    spec = std::move(in.spec);
  } else {
    space = fixture_space(cfg);
    spec = fixture_spec(cfg);
  }
  if (spec->dim() != space->dim()) throw InputError("spec and space dimensions differ");
  const auto grid = time_grid(cfg);

  double alpha = 0.0;
  try {
    alpha = fit_alpha(*space, *spec, default_alpha_grid(), cfg.seed);
    r.add("alpha", true, Json{{"alpha", alpha}});
  } catch (const Error& e) {
    r.error("alpha", e);
    return;
  }
  std::optional<Group> group;
  try {
    group = normalize_to_group(*space, *spec, alpha);
    r.residual("group_unitarity", group_unitarity_residual(*space, *group), 1e-8);
  } catch (const Error& e) {
    r.error("group_unitarity", e);
    return;
  }

  const auto decomp = fundamental_decomposition(*space);
  const FlowReport scan = uniform_bound_scan(*space, decomp, *group, grid);
  r.flow = scan;
  r.add("uniform_bound", scan.uniformly_bounded,
        Json{{"uniformly_bounded", scan.uniformly_bounded},
             {"max_norm", scan.max_norm},
             {"bound_c", scan.bound_c},
             {"growth_rate", scan.growth_rate}});
  double worst = 0.0;
  bool defined = true;
  for (const auto& row : scan.rows) {
    if (!row.factorization_residual) defined = false;
    else worst = std::max(worst, *row.factorization_residual);
  }
  r.add("factorization", defined && worst <= 1e-8,
        Json{{"max_residual", worst}, {"defined_everywhere", defined}}, 1e-8);

  r.guarded("invariant_decomposition", [&] {
    const auto m = invariant_decomposition(*space, *group);
    r.residual("invariant_decomposition", invariance_residual(m, *group), 1e-8,
               Json{{"J", to_json(m.j)}});
  });

  std::optional<Vector> expected;
  if (cfg.in_path.empty() && (cfg.fixture == "oscillator" || cfg.fixture == "shifted"))
    expected = oscillator_eigenvalues(cfg.count, shift_of(cfg));
  generator_records(r, *space, *group, expected);

  r.guarded("line_spectrum", [&] {
    const auto line = line_spectrum_check(*spec, cfg.tol);
    r.add("line_spectrum", line.on_line,
          Json{{"real_part", line.real_part}, {"eigenvalues", to_json(sorted_by_imag(line.eigenvalues))}});
  });
}

// ---------------------------------------------------------------------------
// Fixture suites for the example command.

void example_minkowski(Report& r) {
  const KreinSpace space = minkowski_space();
  const auto sig = space.signature();
  r.add("signature", sig.positive == 1 && sig.negative == 3,
        Json{{"positive", sig.positive}, {"negative", sig.negative}});
  const Vector f = {2.0, 1.0, 0.0, 0.0};
  const Complex p = indefinite_inner(space, f, f);
  r.residual("inner_2100", std::abs(p - 3.0), 1e-12, Json{{"value", to_json(p)}});
  const auto timelike = classify_vector(space, f);
  r.add("classify_2100", timelike.kind == VectorKind::Positive, Json{{"class", to_string(timelike.kind)}});
  const Vector light = {1.0, 1.0, 0.0, 0.0};
  const auto lightlike = classify_vector(space, light);
  r.add("classify_1100", lightlike.kind == VectorKind::Neutral, Json{{"class", to_string(lightlike.kind)}});
}

void pauli_parametric(Report& r, const std::string& tag, double rho, double xi) {
  const PauliModel p = pauli_family(rho, xi);
  const Matrix id = Matrix::identity(2);
  const Matrix& g = p.space.gram();
  r.residual(tag + "j_m_involution", (p.j_m * p.j_m - id).frobenius_norm(), 1e-9);
  r.residual(tag + "j_m_self_adjoint", (g * p.j_m - p.j_m.adjoint() * g).frobenius_norm(), 1e-9);
  r.residual(tag + "exp_q_closed_form", rel_diff(matrix_exp(p.q), p.exp_q), 1e-9);
  r.residual(tag + "j_l_j_m_equals_exp_q", rel_diff(p.j_l * p.j_m, p.exp_q), 1e-9);
  r.residual(tag + "q_anticommutes_j_m",
             (p.j_m * p.q + p.q * p.j_m).frobenius_norm() / std::max(1.0, p.q.frobenius_norm()), 1e-9);
  const QOperator q = q_operator(p.decomp_l, p.decomp_m);
  r.residual(tag + "q_operator_recovers_q", rel_diff(q.q, p.q), 1e-9, Json{{"Q", to_json(q.q)}});
  const Vector v = p.m_plus.column(0);
  const auto cls = classify_vector(p.space, v);
  r.add(tag + "m_plus_positive", cls.kind == VectorKind::Positive,
        Json{{"basis", to_json(v)}, {"self_product", cls.value}});
}

void example_pauli(const RunConfig& cfg, Report& r) {
  const KreinSpace space = pauli_family(0.0, 0.0).space;
  const Vector e1 = {1.0, 0.0};
  const Vector e2 = {0.0, 1.0};
  r.residual("inner_e1_e2", std::abs(indefinite_inner(space, e1, e2) - 1.0), 1e-12);

  const auto canon = fundamental_decomposition(space);
  r.residual("canonical_j_is_sigma1", rel_diff(canon.j, pauli_family(0.0, 0.0).j_l), 1e-12);
  const Vector plus = canon.basis_plus.column(0);
  r.residual("canonical_l_plus_direction", std::abs(std::abs(plus[0] - plus[1])), 1e-12,
             Json{{"basis", to_json(plus)}});
  r.residual("definite_inner_e1_e1", std::abs(definite_inner(canon, e1, e1) - 1.0), 1e-12);

  pauli_parametric(r, "", cfg.rho, cfg.xi);
  pauli_parametric(r, "rho0.7_xi1.1_", 0.7, 1.1);

  // Closed forms at rho = 1, xi = pi/2, where Z = sigma_3.
  const PauliModel ref = pauli_family(1.0, kPi / 2.0);
  const double e = std::numbers::e;
  const Matrix sigma3{{1.0, 0.0}, {0.0, -1.0}};
  r.residual("reference_q_is_sigma3", rel_diff(ref.q, sigma3), 1e-12);
  r.residual("reference_exp_q", rel_diff(ref.exp_q, Matrix{{e, 0.0}, {0.0, 1.0 / e}}), 1e-12);
  r.residual("reference_j_m", rel_diff(ref.j_m, Matrix{{0.0, 1.0 / e}, {e, 0.0}}), 1e-12);
  const Vector m = ref.m_plus.column(0);
  const double collinear = std::abs(m[1] - e * m[0]) / norm2(m);
  const Complex scaled = indefinite_inner(ref.space, m, m) / (m[0] * std::conj(m[0]));
  r.residual("reference_m_plus_span_1_e", collinear, 1e-12,
             Json{{"self_product_of_(1,e)", to_json(scaled)}});
  r.residual("reference_m_plus_self_product_2e", std::abs(scaled - 2.0 * e), 1e-12);
  r.residual("zero_rho_j_m_equals_j_l", rel_diff(pauli_family(0.0, cfg.xi).j_m, ref.j_l), 1e-12);
}

void example_diagonal(const RunConfig& cfg, Report& r) {
  const auto signs = parse_signs(cfg.signs);
  const Vector lambdas = parse_vector(cfg.lambdas);
  const DiagonalModel model = diagonal_model(signs, lambdas);

  r.guarded("alpha", [&] {
    const double alpha = fit_alpha(model.space, model.spec, default_alpha_grid(), cfg.seed);
    r.residual("alpha", std::abs(alpha - 2.0 * lambdas[0].real()), 1e-8,
               Json{{"alpha", alpha}, {"expected", 2.0 * lambdas[0].real()}});
    const Group group = normalize_to_group(model.space, model.spec, alpha);
    const double t = 0.7;
    const Matrix u = group.at(t);
    double worst = 0.0;
    for (std::size_t n = 0; n < lambdas.size(); ++n)
      worst = std::max(worst, std::abs(u(n, n) - std::exp(Complex(0.0, lambdas[n].imag() * t))));
    r.residual("group_phases", worst, 1e-12, Json{{"t", t}});
  });
  r.guarded("line_spectrum", [&] {
    const auto line = line_spectrum_check(model.spec);
    r.add("line_spectrum", line.on_line, Json{{"real_part", line.real_part}});
  });

  const Vector equal_real = {Complex(-0.5, 1.0), Complex(-0.5, 7.0)};
  std::vector<double> moduli;
  for (const auto& l : equal_real) moduli.push_back(std::abs(std::exp(l * 1.3)));
  r.add("equal_moduli_criterion", diagonal_criterion(moduli), Json{{"moduli", moduli}});

  const int pm[] = {1, -1};
  const KreinSpace plane = diagonal_model(pm, Vector(2, 0.0)).space;
  const Complex d2[] = {2.0, Complex(0.0, 2.0)};
  const ThetaReport theta = theta_of(plane, Matrix::diagonal(std::span<const Complex>(d2)), cfg.seed);
  r.residual("theta_diag_2_2i", std::abs(theta.theta - 4.0), 1e-12,
             Json{{"theta", theta.theta}, {"scaled_unitary", theta.is_scaled_unitary}});
  const DiagonalModel growth = diagonal_model(pm, Vector{1.0, 2.0});
  const auto cert = positive_bijection_certificate(plane, evolve(growth.spec, 1.0), cfg.seed);
  r.add("unequal_growth_not_bijective", !cert.certified,
        Json{{"certified", cert.certified}, {"checks_agree", cert.checks_agree}});
}

void example_dilation(Report& r) {
  const Grid grid = Grid::symmetric(16.0, 4001);
  const auto gauss = GridFunction::sample(grid, [](double x) { return Complex(std::exp(-0.5 * x * x)); });
  const auto identity = dilate(gauss, 0.0);
  r.residual("identity_at_zero", max_distance(identity.values(), gauss.values()), 1e-14);

  const Complex base = pt_inner(gauss, gauss);
  r.residual("gaussian_pt_norm", std::abs(base - std::sqrt(kPi)), 1e-8);
  const auto u = dilate(gauss, 0.3);
  r.residual("normalized_preserves_product", std::abs(pt_inner(u, u) - base), 1e-6);

  const std::vector<double> ts = {0.1, 0.3, 0.5};
  const char* labels[] = {"theta_ratio_t0.1", "theta_ratio_t0.3", "theta_ratio_t0.5"};
  std::vector<double> thetas;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    const double theta = dilation_theta(gauss, t);
    thetas.push_back(theta);
    r.residual(labels[k], std::abs(theta - std::exp(-t)), 1e-5,
               Json{{"theta", theta}, {"expected", std::exp(-t)}});
  }
  const auto fit = fit_exponential_law(ts, thetas);
  r.residual("alpha_from_theta", std::abs(fit.alpha + 1.0), 1e-5, Json{{"alpha", fit.alpha}});

  const auto twice = dilate(dilate(gauss, 0.2), 0.3);
  const auto once = dilate(gauss, 0.5);
  r.residual("composition", max_distance(twice.values(), once.values()), 1e-5);
  r.expect_error("time_cap", ErrorCode::TimeOutOfRange, [&] { dilate(gauss, 1.0); });
}

void example_oscillator(const RunConfig& cfg, Report& r) {
  const std::size_t n = cfg.count;
  const Grid grid = Grid::symmetric(kDefaultHalfWidth, kDefaultGridSize);
  const HermiteBasis basis = hermite_basis(n, 0.0, grid);
  r.residual("gram_pt_parity", (basis.gram_pt - signed_identity(n)).max_abs(), 1e-7);
  r.residual("gram_l2_identity", (basis.gram_l2 - Matrix::identity(n)).max_abs(), 1e-7);
  r.residual("pt_self_product_f1", std::abs(basis.gram_pt(1, 1) + 1.0), 1e-7);

  const auto parity = parity_decomposition(basis);
  r.residual("parity_j", (parity.j - signed_identity(n)).max_abs(), 1e-12);
  Matrix definite(n, n);
  const Matrix id = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) definite(i, k) = definite_inner(parity, id.column(i), id.column(k));
  r.residual("definite_inner_matches_l2", (definite - basis.gram_l2).max_abs(), 1e-7);

  const OscillatorModel model = oscillator_group(n, 0.0);
  r.residual("u_at_pi_is_minus_identity", (model.group.at(kPi) + id).max_abs(), 1e-12);
  r.guarded("alpha", [&] {
    const double alpha = fit_alpha(model.space, model.group.spec(), default_alpha_grid(), cfg.seed);
    r.residual("alpha", std::abs(alpha), 1e-8, Json{{"alpha", alpha}});
  });
  double drift = 0.0;
  for (double t : {0.3, 1.0, 2.5}) drift = std::max(drift, (evolved_symmetry(parity, model.group, t) - parity.j).max_abs());
  r.residual("evolved_symmetry_constant", drift, 1e-12);
  r.guarded("invariant_decomposition", [&] {
    const auto m = invariant_decomposition(model.space, model.group);
    r.residual("invariant_decomposition_is_parity", (m.j - parity.j).max_abs(), 1e-12);
  });
  generator_records(r, model.space, model.group, oscillator_eigenvalues(n, 0.0));
  const auto line = line_spectrum_check(model.group.spec());
  r.add("line_spectrum", line.on_line && std::abs(line.real_part) <= 1e-12,
        Json{{"real_part", line.real_part}});
}

void example_shifted(const RunConfig& cfg, Report& r) {
  const std::size_t n = cfg.count;
  const double a = shift_of(cfg);
  const Grid grid = Grid::symmetric(kDefaultHalfWidth, kDefaultGridSize);
  const HermiteBasis basis = hermite_basis(n, a, grid);
  r.residual("gram_pt_parity", (basis.gram_pt - signed_identity(n)).max_abs(), 1e-5);
  const HermiteBasis wider = hermite_basis(n, 0.4, grid);
  r.residual("gram_pt_parity_a0.4", (wider.gram_pt - signed_identity(n)).max_abs(), 1e-6);

  const Grid fourier = Grid::symmetric(kDefaultHalfWidth, kFourierGridSize);
  const double plain = fourier_weight_check(hermite_basis(4, 0.0, fourier));
  r.residual("fourier_weight_a0", plain, 1e-6);
  const double weighted = fourier_weight_check(hermite_basis(n, a, fourier));
  r.residual("fourier_weight", weighted, 1e-4);

  const auto norms = l2_norms(basis);
  bool increasing = true;
  for (std::size_t k = 1; k < norms.size(); ++k) increasing = increasing && norms[k] > norms[k - 1];
  r.add("l2_norms_increasing", a == 0.0 || increasing, Json{{"norms", norms}});

  const OscillatorModel model = oscillator_group(n, a);
  generator_records(r, model.space, model.group, oscillator_eigenvalues(n, a));
  const auto line = line_spectrum_check(oscillator_group(n, 0.5).group.spec());
  r.add("line_spectrum_a0.5", line.on_line && std::abs(line.real_part) <= 1e-12,
        Json{{"real_part", line.real_part}});
  r.expect_error("parity_split_unavailable", ErrorCode::ShiftNotZero, [&] { parity_decomposition(wider); });
}

void example_boost(const RunConfig& cfg, Report& r) {
  const BoostModel model = boost_model();
  const Group group(model.spec, 0.0);
  const auto decomp = fundamental_decomposition(model.space);
  std::vector<double> ts;
  for (int k = 0; k <= 8; ++k) ts.push_back(1.0 + 0.5 * k);
  const FlowReport scan = uniform_bound_scan(model.space, decomp, group, ts);
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& row : scan.rows) {
    const double ratio = row.jt_norm / std::exp(2.0 * row.t);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  r.add("norm_growth_e2t", lo >= 0.9 && hi <= 1.1, Json{{"ratio_min", lo}, {"ratio_max", hi}});
  r.add("not_uniformly_bounded", !scan.uniformly_bounded,
        Json{{"max_norm", scan.max_norm}, {"bound_c", scan.bound_c}});
  r.expect_error("invariant_decomposition", ErrorCode::NeutralEigenvector,
                 [&] { invariant_decomposition(model.space, group); });
  double worst = 0.0;
  for (double t : time_grid(cfg)) {
    const auto f = factorize_unitary(model.space, decomp, group, t);
    worst = std::max({worst, f.reconstruction_residual, f.unitarity_residual, f.commutation_residual});
  }
  r.residual("factorization", worst, 1e-8);
}

void cmd_example(const RunConfig& cfg, Report& r) {
  if (!cfg.in_path.empty()) throw InputError("example runs named fixtures only");
  const std::string& f = cfg.fixture;
  // Configuration problems surface before any check runs.
  if (f == "diagonal") diagonal_model(parse_signs(cfg.signs), parse_vector(cfg.lambdas));
  if (f == "boost") time_grid(cfg);
  r.guarded("fixture", [&] {
    if (f == "minkowski") example_minkowski(r);
    else if (f == "pauli") example_pauli(cfg, r);
    else if (f == "diagonal") example_diagonal(cfg, r);
    else if (f == "dilation") example_dilation(r);
    else if (f == "oscillator") example_oscillator(cfg, r);
    else if (f == "shifted") example_shifted(cfg, r);
    else if (f == "boost") example_boost(cfg, r);
  });
}

// ---------------------------------------------------------------------------
// Output.

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_report(std::ostream& out, const RunConfig& cfg, const Report& r) {
  if (cfg.format == "csv") {
    if (r.flow) {
      write_flow_csv(out, *r.flow);
      return;
    }
    out << "name,status,tolerance,values\n";
    for (const auto& rec : r.records)
      out << rec.name << ',' << rec.status << ','
          << (rec.tolerance ? format_double(*rec.tolerance) : std::string()) << ','
          << csv_quote(rec.values.dump()) << '\n';
    return;
  }
  Json j;
  j["command"] = cfg.command;
  j["config"] = config_echo(cfg);
  Json records = Json::array();
  for (const auto& rec : r.records) {
    records.push_back(Json{{"name", rec.name},
                           {"status", rec.status},
                           {"values", rec.values},
                           {"tolerance", rec.tolerance ? Json(*rec.tolerance) : Json(nullptr)}});
  }
  j["records"] = records;
  if (r.flow) {
    Json rows = Json::array();
    const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    for (const auto& row : r.flow->rows)
      rows.push_back(Json{{"t", row.t},
                          {"jt_norm", row.jt_norm},
                          {"q_anticomm_residual", opt(row.q_anticomm_residual)},
                          {"factorization_residual", opt(row.factorization_residual)},
                          {"unitarity_residual", row.unitarity_residual}});
    j["flow"] = rows;
  }
  j["overall"] = r.passed() ? "pass" : "fail";
  out << j.dump(2) << '\n';
}

void validate(const RunConfig& cfg) {
  if (cfg.fixture.empty() == cfg.in_path.empty())
    throw InputError("give exactly one of --fixture and --in");
  if (!cfg.fixture.empty() &&
      std::find(kFixtures.begin(), kFixtures.end(), cfg.fixture) == kFixtures.end())
    throw InputError("unknown fixture '" + cfg.fixture + "'");
  if (cfg.format != "json" && cfg.format != "csv") throw InputError("--format must be json or csv");
  if (!(cfg.tol > 0.0)) throw InputError("--tol must be positive");
  if (cfg.t_count == 0) throw InputError("--t-count must be at least 1");
  if (cfg.count < 2) throw InputError("--n must be at least 2");
}

void dump_fixture(const RunConfig& cfg) {
  if (cfg.fixture != "oscillator" && cfg.fixture != "shifted")
    throw InputError("--dump is available for the oscillator and shifted fixtures");
  std::ofstream out(cfg.dump);
  if (!out) throw InputError("cannot write " + cfg.dump);
  write_basis_csv(out, hermite_basis(cfg.count, shift_of(cfg),
                                     Grid::symmetric(kDefaultHalfWidth, kDefaultGridSize)));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv("KREIN_TOL")) {
    try {
      cfg.tol = std::stod(env);
    } catch (const std::exception&) {
      err << "error: KREIN_TOL is not a number\n";
      return 2;
    }
  }

  CLI::App app{"Krein-space verification tool"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file with option defaults");
  app.add_option("--fixture", cfg.fixture, "minkowski|pauli|diagonal|dilation|oscillator|shifted|boost");
  app.add_option("--in", cfg.in_path, "JSON input with space, vectors, operator, spec");
  app.add_option("--out", cfg.out_path, "write the report here instead of stdout");
  app.add_option("--format", cfg.format, "json or csv");
  app.add_option("--tol", cfg.tol, "space tolerance (default 1e-9, or KREIN_TOL)");
  app.add_option("--seed", cfg.seed, "sampling seed");
  app.add_option("--t-start", cfg.t_start);
  app.add_option("--t-stop", cfg.t_stop);
  app.add_option("--t-count", cfg.t_count);
  app.add_option("--rho", cfg.rho);
  app.add_option("--xi", cfg.xi);
  app.add_option("--a", cfg.shift, "Hermite shift");
  app.add_option("--n", cfg.count, "Hermite basis size");
  app.add_option("--signs", cfg.signs, "comma-separated + and -");
  app.add_option("--lambdas", cfg.lambdas, "comma-separated complex exponents");
  app.add_option("--vector", cfg.vectors, "comma-separated complex entries; repeatable");
  app.add_option("--diag", cfg.diag, "diagonal operator entries");
  app.add_flag("--expect-unitary", cfg.expect_unitary);
  app.add_option("--dump", cfg.dump, "write the fixture's Hermite basis as CSV");
  for (const char* name : {"classify", "theta", "extend", "flow", "example"})
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  Report report;
  try {
    validate(cfg);
    if (cfg.command == "classify") cmd_classify(cfg, report);
    else if (cfg.command == "theta") cmd_theta(cfg, report);
    else if (cfg.command == "extend") cmd_extend(cfg, report);
    else if (cfg.command == "flow") cmd_flow(cfg, report);
    else cmd_example(cfg, report);
    if (!cfg.dump.empty()) dump_fixture(cfg);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  if (cfg.out_path.empty()) {
    write_report(out, cfg, report);
  } else {
    std::ofstream file(cfg.out_path);
    if (!file) {
      err << "error: cannot write " << cfg.out_path << '\n';
      return 2;
    }
    write_report(file, cfg, report);
  }
  return report.passed() ? 0 : 1;
}

}  // namespace krein::cli
