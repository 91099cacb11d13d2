#pragma once

#include <string>

#include <json.hpp>

#include "supmech/states.hpp"

namespace supmech {

using Json = nlohmann::ordered_json;

/// "Matrix(2)", "Polynomial(1)", "Tensor(Matrix(2), Matrix(3))". Throws SpecParseError.
AlgebraDescriptor parse_algebra(const std::string& text, double tolerance = kDefaultTolerance);

/// {"kind": "matrix", "n": 2}, {"kind": "polynomial", "pairs": 1},
/// {"kind": "tensor", "left": .., "right": ..}, or the string form.
Json algebra_to_json(const AlgebraDescriptor& algebra);
AlgebraDescriptor algebra_from_json(const Json& j, const std::string& field = "algebra",
                                    double tolerance = kDefaultTolerance);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& field);

/// Element literals: matrices as nested arrays of [re, im] pairs, polynomials
/// as lists of {"exponents": [..], "coeff": [re, im]}, tensors as lists of
/// {"left": .., "right": ..}. A bare number is a multiple of the unit.
Json element_literal(const AlgebraElement& a);
AlgebraElement element_from_literal(const AlgebraDescriptor& algebra, const Json& j, const std::string& field);

/// {"algebra": "...", "value": literal}, used for witnesses in reports.
Json element_to_json(const AlgebraElement& a);
AlgebraElement element_from_json(const Json& j, const std::string& field = "element");

/// {"density": literal}, {"pure": [[re, im], ..]}, {"points": [{"point": [..], "weight": w}]},
/// or {"product": {"left": .., "right": ..}}.
Json state_to_json(const StateFunctional& phi);
StateFunctional state_from_json(const AlgebraDescriptor& algebra, const Json& j, const std::string& field = "state");

/// Dumps with every floating-point number printed to 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

/// Throws SpecParseError naming the first key of `j` outside `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& field);

}  // namespace supmech
