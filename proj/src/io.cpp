#include "krein/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <ostream>

namespace krein {
namespace {

std::vector<double> reals(const Json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorCode::ParseError, std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Row-major entries from either nested rows or a flat array.
std::vector<double> entries(const Json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorCode::ParseError, std::string(what) + " must be an array");
  if (j.empty() || !j.front().is_array()) return reals(j, what);
  std::vector<double> out;
  std::size_t width = j.front().size();
  for (const auto& row : j) {
    const auto r = reals(row, what);
    if (r.size() != width) fail(ErrorCode::ParseError, std::string(what) + " rows differ in length");
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::size_t count_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(ErrorCode::ParseError, std::string("\"") + key + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Json to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Json to_json(std::span<const Complex> v) {
  Json re = Json::array();
  Json im = Json::array();
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return Json{{"re", re}, {"im", im}};
}

Json to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const KreinSpace& space) {
  return Json{{"dim", space.dim()}, {"gram", to_json(space.gram())}, {"tol", space.tol()}};
}

Json to_json(const FundamentalDecomposition& d) {
  return Json{{"dim", d.dim()},
              {"gram", to_json(d.gram)},
              {"basis_plus", to_json(d.basis_plus)},
              {"basis_minus", to_json(d.basis_minus)},
              {"J", to_json(d.j)}};
}

Json to_json(const ThetaReport& r) {
  return Json{{"theta", r.theta},
              {"scaled_unitary", r.is_scaled_unitary},
              {"residual", r.residual},
              {"ratio_min", r.sampled_min},
              {"ratio_max", r.sampled_max}};
}

Json to_json(const SemigroupSpec& spec) {
  if (spec.is_diagonal()) {
    const auto& d = spec.diagonal_form();
    return Json{{"kind", "diagonal"}, {"basis", to_json(d.basis)}, {"lambdas", to_json(d.lambdas)}};
  }
  return Json{{"kind", "generator"}, {"generator", to_json(spec.generator_form().generator)}};
}

Json to_json(const Group& group) {
  return Json{{"spec", to_json(group.spec())}, {"alpha", group.alpha()}};
}

Matrix matrix_from_json(const Json& j) {
  const std::size_t rows = count_field(j, "rows");
  const std::size_t cols = count_field(j, "cols");
  const auto re = entries(field(j, "re"), "re");
  const auto im = j.contains("im") ? entries(j.at("im"), "im") : std::vector<double>(re.size(), 0.0);
  if (re.size() != rows * cols || im.size() != rows * cols)
    fail(ErrorCode::ParseError, "matrix entry count differs from rows * cols");
  std::vector<Complex> data(re.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = Complex(re[i], im[i]);
  return Matrix(rows, cols, std::move(data));
}

Vector vector_from_json(const Json& j) {
  if (j.is_array()) {
    const auto re = reals(j, "vector");
    return Vector(re.begin(), re.end());
  }
  const auto re = reals(field(j, "re"), "re");
  const auto im = j.contains("im") ? reals(j.at("im"), "im") : std::vector<double>(re.size(), 0.0);
  if (re.size() != im.size()) fail(ErrorCode::ParseError, "re and im lengths differ");
  Vector out(re.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

KreinSpace space_from_json(const Json& j) {
  Matrix gram = matrix_from_json(field(j, "gram"));
  if (j.contains("dim") && count_field(j, "dim") != gram.rows())
    fail(ErrorCode::ParseError, "\"dim\" differs from the Gram matrix size");
  double tol = kDefaultTol;
  if (j.contains("tol")) {
    if (!j.at("tol").is_number()) fail(ErrorCode::ParseError, "\"tol\" must be a number");
    tol = j.at("tol").get<double>();
  }
  return KreinSpace(std::move(gram), tol);
}

SemigroupSpec spec_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (kind == "diagonal")
    return SemigroupSpec::diagonal(matrix_from_json(field(j, "basis")),
                                   vector_from_json(field(j, "lambdas")));
  if (kind == "generator") return SemigroupSpec::from_generator(matrix_from_json(field(j, "generator")));
  fail(ErrorCode::ParseError, "spec kind must be \"diagonal\" or \"generator\"");
}

Complex parse_complex(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  const auto bad = [&]() -> Complex { fail(ErrorCode::ParseError, "not a complex number: " + std::string(text)); };
  if (s.empty()) return bad();
  if (s.back() != 'i' && s.back() != 'j') {
    double re = 0.0;
    if (!parse_real(s, re)) return bad();
    return {re, 0.0};
  }
  s.pop_back();
  // Split at the last sign that is not the leading one or part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_part = split == std::string::npos ? s : s.substr(split);
  if (im_part.empty() || im_part == "+") im_part = "1";
  if (im_part == "-") im_part = "-1";
  double re = 0.0;
  double im = 0.0;
  if (!re_part.empty() && !parse_real(re_part, re)) return bad();
  if (!parse_real(im_part, im)) return bad();
  return {re, im};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_flow_csv(std::ostream& out, const FlowReport& report) {
  out << "t,jt_norm,q_anticomm_residual,factorization_residual,unitarity_residual\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : report.rows)
    out << format_double(r.t) << ',' << format_double(r.jt_norm) << ',' << opt(r.q_anticomm_residual)
        << ',' << opt(r.factorization_residual) << ',' << format_double(r.unitarity_residual) << '\n';
}

void write_basis_csv(std::ostream& out, const HermiteBasis& basis) {
  out << 'x';
  for (std::size_t n = 0; n < basis.count; ++n) out << ",re_phi_" << n << ",im_phi_" << n;
  out << '\n';
  if (basis.functions.empty()) return;
  const Grid& grid = basis.functions.front().grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << format_double(grid.point(k));
    for (const auto& f : basis.functions)
      out << ',' << format_double(f.values()[k].real()) << ',' << format_double(f.values()[k].imag());
    out << '\n';
  }
}

}  // namespace krein
