// Python bindings. Specs, element literals, and reports cross the boundary as
// JSON text; the supmech package wraps them in dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "supmech/errors.hpp"
#include "supmech/suites.hpp"

namespace py = pybind11;
using namespace supmech;

namespace {

std::string report_text(const SuiteReport& r) { return dump_json(to_json(r)); }

SystemSpec spec_from_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecParseError("", e.what());
    }
    return parse_system_spec(j, default_tolerance());
}

SymplecticStructure structure_from_text(const std::string& text) {
    const auto spec = spec_from_text(text);
    if (spec.is_coupled()) throw SpecParseError("algebra", "expected a single-system spec");
    return build_structure(spec.algebra, spec.form);
}

}  // namespace

PYBIND11_MODULE(_supmech, m) {
    m.doc() = "Derivation-based symplectic mechanics on matrix and polynomial algebras";
    m.attr("__version__") = kToolVersion;

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<SpecParseError>(m, "SpecParseError", error.ptr());
    py::register_exception<ForbiddenCoupling>(m, "ForbiddenCoupling", error.ptr());
    py::register_exception<StepTooLarge>(m, "StepTooLarge", error.ptr());

    m.def("default_tolerance", &default_tolerance);

    m.def(
        "parse_algebra", [](const std::string& text) { return parse_algebra(text, default_tolerance()).to_string(); },
        py::arg("text"));

    m.def(
        "verify",
        [](const std::string& target, std::optional<std::string> algebra, int trials, std::uint64_t seed,
           std::optional<double> hbar, std::optional<double> hbar_right) {
            VerifyOptions options;
            options.target = target;
            if (algebra) options.algebra = parse_algebra(*algebra, default_tolerance());
            options.trials = trials;
            options.seed = seed;
            options.hbar = hbar;
            options.right_hbar = hbar_right;
            py::gil_scoped_release release;
            return report_text(run_verify(options));
        },
        py::arg("target"), py::arg("algebra") = py::none(), py::arg("trials") = 100, py::arg("seed") = 1,
        py::arg("hbar") = py::none(), py::arg("hbar_right") = py::none());

    m.def(
        "classify",
        [](const std::string& left, const std::string& right, std::uint64_t seed) {
            return report_text(classify_report(structure_from_text(left), structure_from_text(right), seed));
        },
        py::arg("left"), py::arg("right"), py::arg("seed") = 11);

    m.def(
        "jacobi",
        [](const std::string& bracket, const std::string& world, int trials, std::uint64_t seed) {
            return report_text(jacobi_report(bracket, world, trials, seed));
        },
        py::arg("bracket"), py::arg("world"), py::arg("trials") = 20, py::arg("seed") = 1);

    m.def(
        "run_dynamics",
        [](const std::string& spec, std::uint64_t seed) {
            const auto s = spec_from_text(spec);
            std::ostringstream csv;
            auto report = run_dynamics(s, &csv, seed);
            return std::make_pair(report_text(report), csv.str());
        },
        py::arg("spec"), py::arg("seed") = 11);

    m.def(
        "poisson_bracket",
        [](const std::string& spec, const std::string& a, const std::string& b) {
            const auto s = structure_from_text(spec);
            const auto x = element_from_literal(s.algebra(), Json::parse(a), "a");
            const auto y = element_from_literal(s.algebra(), Json::parse(b), "b");
            return dump_json(element_literal(s.poisson_bracket(x, y)));
        },
        py::arg("spec"), py::arg("a"), py::arg("b"));

    m.def(
        "exit_code", [](const std::string& report) { return exit_code(report_from_json(Json::parse(report))); },
        py::arg("report"));
}
