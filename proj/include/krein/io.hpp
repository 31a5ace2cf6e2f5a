#pragma once

// JSON and CSV serialization shared by the command-line tool and tests.
//
// Matrix:      {"rows": r, "cols": c, "re": [[row], ...], "im": [[row], ...]}
//              (input also accepts flat row-major arrays, and "im" may be
//              omitted for real matrices)
// Vector:      {"re": [...], "im": [...]} or a plain array of reals
// KreinSpace:  {"dim": n, "gram": Matrix, "tol": t}

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "krein/cone_ops.hpp"
#include "krein/dynamics.hpp"
#include "krein/krein_space.hpp"
#include "krein/models.hpp"

namespace krein {

using Json = nlohmann::ordered_json;

Json to_json(const Matrix& m);
Json to_json(std::span<const Complex> v);
Json to_json(Complex z);
Json to_json(const KreinSpace& space);
Json to_json(const FundamentalDecomposition& d);
Json to_json(const ThetaReport& r);
Json to_json(const SemigroupSpec& spec);
Json to_json(const Group& group);

/// Throws ParseError on malformed input.
Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);
KreinSpace space_from_json(const Json& j);
SemigroupSpec spec_from_json(const Json& j);

/// Parses "3", "-2.5e-1", "i", "-i", "1+2i", "0.5-1e-3i". Throws ParseError.
Complex parse_complex(std::string_view text);

/// printf("%.17g").
std::string format_double(double x);

/// Header t,jt_norm,q_anticomm_residual,factorization_residual,unitarity_residual;
/// undefined entries are left empty.
void write_flow_csv(std::ostream& out, const FlowReport& report);

/// Header x,re_phi_0,im_phi_0,re_phi_1,...
void write_basis_csv(std::ostream& out, const HermiteBasis& basis);

}  // namespace krein
