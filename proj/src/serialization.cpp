#include "supmech/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

#include "supmech/errors.hpp"

namespace supmech {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\n");
    return s.substr(b, e - b + 1);
}

int positive_int(const Json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 1) throw SpecParseError(field, "expected a positive integer");
    return j.get<int>();
}

double number(const Json& j, const std::string& field) {
    if (!j.is_number()) throw SpecParseError(field, "expected a number");
    return j.get<double>();
}

/// Splits "A, B" at the top-level comma.
std::pair<std::string, std::string> split_pair(const std::string& s, const std::string& whole) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (s[i] == ',' && depth == 0) return {s.substr(0, i), s.substr(i + 1)};
    }
    throw SpecParseError("algebra", "cannot parse '" + whole + "'");
}

void dump_to(const Json& j, std::string& out, int indent, int level) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * level), ' ') : "";
    const std::string sep = indent > 0 ? ": " : ":";
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",";
            first = false;
            out += pad + Json(it.key()).dump() + sep;
            dump_to(it.value(), out, indent, level + 1);
        }
        out += close + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Short numeric arrays stay on one line.
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); }) && j.size() <= 8;
        out += "[";
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat ? ", " : ",";
            first = false;
            if (!flat) out += pad;
            dump_to(e, out, flat ? 0 : indent, level + 1);
        }
        out += (flat ? "" : close) + "]";
    } else if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    } else {
        out += j.dump();
    }
}

}  // namespace

AlgebraDescriptor parse_algebra(const std::string& text, double tolerance) {
    const std::string s = trim(text);
    static const std::regex simple(R"((Matrix|Polynomial)\s*\(\s*(\d+)\s*\))", std::regex::icase);
    std::smatch m;
    if (std::regex_match(s, m, simple)) {
        const int n = std::stoi(m[2]);
        if (n < 1) throw SpecParseError("algebra", "size must be positive in '" + text + "'");
        const char c = static_cast<char>(std::tolower(m[1].str()[0]));
        return c == 'm' ? AlgebraDescriptor::matrix(n, tolerance) : AlgebraDescriptor::polynomial(n, tolerance);
    }
    static const std::regex tensor(R"(Tensor\s*\((.*)\))", std::regex::icase);
    if (std::regex_match(s, m, tensor)) {
        auto [l, r] = split_pair(m[1].str(), text);
        return AlgebraDescriptor::tensor(parse_algebra(l, tolerance), parse_algebra(r, tolerance));
    }
    throw SpecParseError("algebra", "cannot parse '" + text + "'");
}

Json algebra_to_json(const AlgebraDescriptor& algebra) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return Json{{"kind", "matrix"}, {"n", algebra.dimension()}};
        case AlgebraDescriptor::Kind::Polynomial:
            return Json{{"kind", "polynomial"}, {"pairs", algebra.num_pairs()}};
        case AlgebraDescriptor::Kind::Tensor:
            return Json{{"kind", "tensor"}, {"left", algebra_to_json(algebra.left())}, {"right", algebra_to_json(algebra.right())}};
    }
    return {};
}

AlgebraDescriptor algebra_from_json(const Json& j, const std::string& field, double tolerance) {
    if (j.is_string()) {
        try {
            return parse_algebra(j.get<std::string>(), tolerance);
        } catch (const SpecParseError& e) {
            throw SpecParseError(field, e.what());
        }
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw SpecParseError(field, "expected an algebra string or an object with a \"kind\"");
    }
    const auto kind = j["kind"].get<std::string>();
    if (kind == "matrix") {
        reject_unknown_keys(j, {"kind", "n"}, field);
        if (!j.contains("n")) throw SpecParseError(field + ".n", "missing");
        return AlgebraDescriptor::matrix(positive_int(j["n"], field + ".n"), tolerance);
    }
    if (kind == "polynomial") {
        reject_unknown_keys(j, {"kind", "pairs"}, field);
        if (!j.contains("pairs")) throw SpecParseError(field + ".pairs", "missing");
        return AlgebraDescriptor::polynomial(positive_int(j["pairs"], field + ".pairs"), tolerance);
    }
    if (kind == "tensor") {
        reject_unknown_keys(j, {"kind", "left", "right"}, field);
        if (!j.contains("left") || !j.contains("right")) throw SpecParseError(field, "tensor needs left and right");
        return AlgebraDescriptor::tensor(algebra_from_json(j["left"], field + ".left", tolerance),
                                         algebra_from_json(j["right"], field + ".right", tolerance));
    }
    throw SpecParseError(field + ".kind", "unknown algebra kind '" + kind + "'");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw SpecParseError(field, "expected a number or a [re, im] pair");
}

Json element_literal(const AlgebraElement& a) {
    if (a.is_matrix()) {
        Json rows = Json::array();
        const Matrix& m = a.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
            rows.push_back(std::move(row));
        }
        return rows;
    }
    if (a.is_polynomial()) {
        Json terms = Json::array();
        for (const auto& [exps, c] : a.polynomial().terms()) {
            terms.push_back(Json{{"exponents", exps}, {"coeff", complex_to_json(c)}});
        }
        return terms;
    }
    Json terms = Json::array();
    for (const auto& t : a.terms()) {
        terms.push_back(Json{{"left", element_literal(t.left)}, {"right", element_literal(t.right)}});
    }
    return terms;
}

AlgebraElement element_from_literal(const AlgebraDescriptor& algebra, const Json& j, const std::string& field) {
    if (j.is_number()) return AlgebraElement::scalar(algebra, j.get<double>());
    if (!j.is_array()) throw SpecParseError(field, "expected an element literal");
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix: {
            const int n = algebra.dimension();
            if (static_cast<int>(j.size()) != n) throw SpecParseError(field, "expected " + std::to_string(n) + " rows");
            Matrix m(n, n);
            for (int i = 0; i < n; ++i) {
                const auto f = field + "[" + std::to_string(i) + "]";
                if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) {
                    throw SpecParseError(f, "expected " + std::to_string(n) + " entries");
                }
                for (int k = 0; k < n; ++k) m(i, k) = complex_from_json(j[i][k], f + "[" + std::to_string(k) + "]");
            }
            return AlgebraElement(algebra, std::move(m));
        }
        case AlgebraDescriptor::Kind::Polynomial: {
            const int nv = algebra.num_variables();
            Polynomial p(nv);
            for (std::size_t t = 0; t < j.size(); ++t) {
                const auto f = field + "[" + std::to_string(t) + "]";
                const auto& term = j[t];
                if (!term.is_object()) throw SpecParseError(f, "expected {exponents, coeff}");
                reject_unknown_keys(term, {"exponents", "coeff"}, f);
                if (!term.contains("exponents") || !term["exponents"].is_array() ||
                    static_cast<int>(term["exponents"].size()) != nv) {
                    throw SpecParseError(f + ".exponents", "expected " + std::to_string(nv) + " exponents");
                }
                Polynomial::Exponents e;
                for (const auto& x : term["exponents"]) {
                    if (!x.is_number_integer() || x.get<long long>() < 0) {
                        throw SpecParseError(f + ".exponents", "exponents must be nonnegative integers");
                    }
                    e.push_back(x.get<int>());
                }
                if (!term.contains("coeff")) throw SpecParseError(f + ".coeff", "missing");
                p.add_term(e, complex_from_json(term["coeff"], f + ".coeff"));
            }
            return AlgebraElement(algebra, std::move(p));
        }
        case AlgebraDescriptor::Kind::Tensor: {
            auto out = AlgebraElement::zero(algebra);
            for (std::size_t t = 0; t < j.size(); ++t) {
                const auto f = field + "[" + std::to_string(t) + "]";
                const auto& term = j[t];
                if (!term.is_object()) throw SpecParseError(f, "expected {left, right}");
                reject_unknown_keys(term, {"left", "right"}, f);
                if (!term.contains("left") || !term.contains("right")) throw SpecParseError(f, "expected {left, right}");
                out += tensor_element(element_from_literal(algebra.left(), term["left"], f + ".left"),
                                      element_from_literal(algebra.right(), term["right"], f + ".right"));
            }
            return out;
        }
    }
    throw SpecParseError(field, "unsupported algebra");
}

Json element_to_json(const AlgebraElement& a) {
    return Json{{"algebra", a.algebra().to_string()}, {"value", element_literal(a)}};
}

AlgebraElement element_from_json(const Json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("algebra") || !j.contains("value")) {
        throw SpecParseError(field, "expected {algebra, value}");
    }
    reject_unknown_keys(j, {"algebra", "value"}, field);
    return element_from_literal(algebra_from_json(j["algebra"], field + ".algebra"), j["value"], field + ".value");
}

Json state_to_json(const StateFunctional& phi) {
    switch (phi.kind()) {
        case StateFunctional::Kind::DensityMatrix:
            return Json{{"density", element_literal(AlgebraElement(
                                        AlgebraDescriptor::matrix(static_cast<int>(phi.density().rows())), phi.density()))}};
        case StateFunctional::Kind::PhaseEnsemble: {
            Json pts = Json::array();
            for (const auto& p : phi.points()) pts.push_back(Json{{"point", p.point}, {"weight", p.weight}});
            return Json{{"points", pts}};
        }
        case StateFunctional::Kind::Product:
            return Json{{"product", Json{{"left", state_to_json(phi.left())}, {"right", state_to_json(phi.right())}}}};
    }
    return {};
}

StateFunctional state_from_json(const AlgebraDescriptor& algebra, const Json& j, const std::string& field) {
    if (!j.is_object() || j.size() != 1) {
        throw SpecParseError(field, "expected exactly one of density, pure, points, product");
    }
    reject_unknown_keys(j, {"density", "pure", "points", "product"}, field);
    const auto flat = algebra.flat_dimension();
    if (j.contains("density")) {
        if (!flat) throw SpecParseError(field + ".density", "density matrices need a matrix algebra");
        auto m = element_from_literal(AlgebraDescriptor::matrix(*flat), j["density"], field + ".density");
        return StateFunctional::density_matrix(algebra, m.matrix());
    }
    if (j.contains("pure")) {
        if (!flat) throw SpecParseError(field + ".pure", "pure vectors need a matrix algebra");
        const auto& v = j["pure"];
        if (!v.is_array() || static_cast<int>(v.size()) != *flat) {
            throw SpecParseError(field + ".pure", "expected " + std::to_string(*flat) + " amplitudes");
        }
        Eigen::VectorXcd psi(*flat);
        for (int i = 0; i < *flat; ++i) psi(i) = complex_from_json(v[i], field + ".pure[" + std::to_string(i) + "]");
        if (psi.norm() == 0.0) throw SpecParseError(field + ".pure", "zero vector");
        return StateFunctional::pure(algebra, psi);
    }
    if (j.contains("points")) {
        if (!algebra.is_polynomial()) throw SpecParseError(field + ".points", "phase points need a polynomial algebra");
        const auto& pts = j["points"];
        if (!pts.is_array() || pts.empty()) throw SpecParseError(field + ".points", "expected a nonempty list");
        std::vector<PhasePoint> points;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto f = field + ".points[" + std::to_string(k) + "]";
            if (!pts[k].is_object()) throw SpecParseError(f, "expected {point, weight}");
            reject_unknown_keys(pts[k], {"point", "weight"}, f);
            if (!pts[k].contains("point") || !pts[k]["point"].is_array() ||
                static_cast<int>(pts[k]["point"].size()) != algebra.num_variables()) {
                throw SpecParseError(f + ".point", "expected " + std::to_string(algebra.num_variables()) + " coordinates");
            }
            PhasePoint p;
            for (const auto& x : pts[k]["point"]) p.point.push_back(number(x, f + ".point"));
            p.weight = pts[k].contains("weight") ? number(pts[k]["weight"], f + ".weight") : 1.0;
            points.push_back(std::move(p));
        }
        return StateFunctional::phase_ensemble(algebra, std::move(points));
    }
    if (!algebra.is_tensor()) throw SpecParseError(field + ".product", "product states need a tensor algebra");
    const auto& p = j["product"];
    if (!p.is_object() || !p.contains("left") || !p.contains("right")) {
        throw SpecParseError(field + ".product", "expected {left, right}");
    }
    reject_unknown_keys(p, {"left", "right"}, field + ".product");
    return StateFunctional::product(state_from_json(algebra.left(), p["left"], field + ".product.left"),
                                    state_from_json(algebra.right(), p["right"], field + ".product.right"));
}

std::string dump_json(const Json& j, int indent) {
    std::string out;
    dump_to(j, out, indent, 0);
    return out;
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& field) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw SpecParseError(field.empty() ? it.key() : field + "." + it.key(), "unknown key");
    }
}

}  // namespace supmech
