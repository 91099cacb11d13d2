#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "supmech/errors.hpp"
#include "supmech/suites.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto p1 = AlgebraDescriptor::polynomial(1);

std::string without_wall_time(SuiteReport r) {
    r.wall_time_ms = 0.0;
    return emit_report(r, ReportFormat::Json);
}

}  // namespace

TEST_CASE("algebra descriptors parse and print") {
    CHECK(parse_algebra("Matrix(3)") == AlgebraDescriptor::matrix(3));
    CHECK(parse_algebra(" Polynomial( 2 )") == AlgebraDescriptor::polynomial(2));
    const auto t = parse_algebra("Tensor(Polynomial(1), Tensor(Matrix(2), Matrix(2)))");
    CHECK(t.is_tensor());
    CHECK(t.right().is_tensor());
    CHECK(parse_algebra(t.to_string()) == t);
    CHECK(algebra_from_json(algebra_to_json(t)) == t);
    CHECK_THROWS_AS(parse_algebra("Matrix(0)"), SpecParseError);
    CHECK_THROWS_AS(parse_algebra("Matrix(2"), SpecParseError);
    CHECK_THROWS_AS(parse_algebra("Banach(2)"), SpecParseError);
}

TEST_CASE("elements round-trip through JSON") {
    Rng rng(1);
    for (const auto& alg : {m2, AlgebraDescriptor::matrix(3), p1, AlgebraDescriptor::tensor(p1, m2),
                            AlgebraDescriptor::tensor(m2, AlgebraDescriptor::matrix(3))}) {
        const auto a = random_element(alg, rng);
        const auto text = dump_json(element_to_json(a));
        const auto back = element_from_json(Json::parse(text));
        CHECK(back.algebra() == alg);
        CHECK((back - a).norm() == 0.0);
    }
    CHECK(approx_equal(element_from_literal(m2, Json(2.5), "x"), 2.5 * AlgebraElement::unit(m2)));
    CHECK_THROWS_AS(element_from_literal(m2, Json::parse("[[1, 0], [0]]"), "x"), SpecParseError);
}

TEST_CASE("states round-trip through JSON") {
    Rng rng(2);
    for (const auto& alg : {m2, p1, AlgebraDescriptor::tensor(m2, m2)}) {
        const auto phi = random_state(alg, rng);
        const auto back = state_from_json(alg, Json::parse(dump_json(state_to_json(phi))));
        const auto a = random_element(alg, rng);
        CHECK(expectation(back, a) == expectation(phi, a));
    }
}

TEST_CASE("numbers are printed with 17 significant digits") {
    const Json j{{"x", 0.1}, {"y", 1.0 / 3.0}};
    const auto text = dump_json(j);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(Json::parse(text)["y"].get<double>() == 1.0 / 3.0);
}

TEST_CASE("empty and failing reports") {
    SuiteReport empty;
    empty.suite = "empty";
    const auto j = Json::parse(emit_report(empty, ReportFormat::Json));
    CHECK(j["cases"].is_array());
    CHECK(j["cases"].empty());
    CHECK(j["suiteName"] == "empty");
    CHECK(exit_code(empty) == 0);

    SuiteReport r;
    r.suite = "s";
    CaseResult bad;
    bad.name = "b";
    bad.residual = 0.5;
    bad.tolerance = 1e-9;
    bad.witness = element_to_json(pauli_x());
    r.cases.push_back(bad);
    const auto jr = Json::parse(emit_report(r, ReportFormat::Json));
    CHECK(jr["cases"][0]["status"] == "fail");
    CHECK(jr["cases"][0].contains("witness"));
    CHECK(exit_code(r) == 1);
    r.cases[0].expected_failure = true;
    CHECK(exit_code(r) == 2);

    const auto round = report_from_json(to_json(r));
    CHECK(emit_report(round, ReportFormat::Json) == emit_report(r, ReportFormat::Json));
}

TEST_CASE("reports are deterministic in the seed") {
    const auto a = run_symplectic_suite(m2, 10, 42);
    const auto b = run_symplectic_suite(m2, 10, 42);
    CHECK(without_wall_time(a) == without_wall_time(b));
    const auto c = run_symplectic_suite(m2, 10, 43);
    CHECK(without_wall_time(a) != without_wall_time(c));
    for (std::size_t k = 1; k < a.cases.size(); ++k) CHECK(a.cases[k - 1].name < a.cases[k].name);
}

TEST_CASE("system specs validate") {
    const auto spec = parse_system_spec(Json::parse(R"j({
        "algebra": "Matrix(2)", "form": "quantum", "hbar": 2.0,
        "hamiltonian": [[1, 0], [0, -1]],
        "state": {"pure": [1, 0]},
        "evolution": {"t_end": 1, "dt": 0.01, "method": "exact"},
        "track": [{"name": "sx", "value": [[0, 1], [1, 0]]}]
    })j"));
    CHECK(spec.form.hbar == 2.0);
    CHECK(spec.evolution->method == EvolutionMethod::ExactConjugation);
    CHECK(spec.track.size() == 1);

    auto field_of = [](const char* text) {
        try {
            parse_system_spec(Json::parse(text));
        } catch (const SpecParseError& e) {
            return e.field();
        }
        return std::string("no error");
    };
    CHECK(field_of(R"j({"algebra": "Matrix(2)", "form": "quantum", "hamiltonain": 1})j") == "hamiltonain");
    CHECK(field_of(R"j({"algebra": "Matrix(2)", "form": "quantum", "hamiltonian": [[0, 1], [0, 0]]})j") == "hamiltonian");
    CHECK(field_of(R"j({"algebra": "Matrix(2)", "form": "classical"})j") == "no error");
    CHECK(field_of(R"j({"algebra": "Matrix(2)", "form": "quantum", "evolution": {"t_end": 1}})j") == "evolution.dt");
    CHECK(field_of(R"j({"algebra": "Matrix(2)", "form": "quantum", "state": {"density": [[2, 0], [0, -1]]}})j") == "state");
    CHECK(field_of(R"j({"algebra": "Tensor(Matrix(2), Matrix(2))", "form": "quantum"})j") == "form");
    CHECK_THROWS_AS(build_structure(m2, parse_structure_spec(Json("classical"), std::nullopt, "form")), SpecParseError);
}

TEST_CASE("tolerance override from the environment") {
    CHECK(default_tolerance() == kDefaultTolerance);
    setenv("SUPMECH_TOLERANCE", "1e-8", 1);
    CHECK(default_tolerance() == 1e-8);
    setenv("SUPMECH_TOLERANCE", "nonsense", 1);
    CHECK_THROWS_AS(default_tolerance(), SpecParseError);
    unsetenv("SUPMECH_TOLERANCE");
}

TEST_CASE("dynamics runs write a trajectory") {
    auto spec = parse_system_spec(Json::parse(R"j({
        "algebra": "Matrix(2)", "form": "quantum",
        "hamiltonian": [[0.5, 0], [0, -0.5]],
        "state": {"pure": [1, 1]},
        "evolution": {"t_end": 1, "dt": 0.01, "record_every": 50},
        "track": [{"name": "sx", "value": [[0, 1], [1, 0]]}]
    })j"));
    std::ostringstream csv;
    const auto report = run_dynamics(spec, &csv);
    CHECK(report.all_passed());
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "time,sx");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 3);
}
