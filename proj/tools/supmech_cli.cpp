// Command-line entry point: verification suites, tensor-world checks, and dynamics runs.
//
// Exit codes: 0 all cases pass, 1 unexpected failure, 2 expected-forbidden
// outcome (a coupling or bracket the theory rules out), 3 spec or usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "supmech/errors.hpp"
#include "supmech/suites.hpp"

using namespace supmech;

namespace {

constexpr int kSpecError = 3;
constexpr int kForbidden = 2;
constexpr int kFailure = 1;

void print_error(const std::string& kind, const std::string& message, Json extra = Json::object()) {
    Json j{{"error", kind}, {"message", message}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    std::cerr << dump_json(j) << "\n";
}

int finish(const SuiteReport& report, const std::string& json_path, const std::string& format) {
    std::cout << emit_report(report, format == "json" ? ReportFormat::Json : ReportFormat::Text);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw SpecParseError("--json", "cannot write " + json_path);
        out << emit_report(report, ReportFormat::Json);
    }
    return exit_code(report);
}

SymplecticStructure structure_from_file(const std::string& path, const std::string& flag) {
    try {
        const auto spec = load_system_spec(path, default_tolerance());
        if (spec.is_coupled()) throw SpecParseError("algebra", "expected a single-system spec");
        return build_structure(spec.algebra, spec.form);
    } catch (const SpecParseError& e) {
        throw SpecParseError(flag, e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Derivation-based symplectic mechanics: verification and dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string format = "text";
    std::string json_path;
    std::uint64_t seed = 1;

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    std::string target;
    std::string algebra_text;
    int trials = 100;
    double hbar = 0.0;
    double hbar_right = 0.0;
    verify->add_option("target", target, "calculus, symplectic, tensor, or dynamics")
        ->required()
        ->check(CLI::IsMember({"calculus", "symplectic", "tensor", "dynamics"}));
    verify->add_option("--algebra", algebra_text, "e.g. Matrix(2), Polynomial(1), Tensor(Matrix(2), Matrix(2))");
    verify->add_option("--trials", trials, "Random trials per case")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Root seed");
    verify->add_option("--hbar", hbar, "ħ for quantum structures")->check(CLI::PositiveNumber);
    verify->add_option("--hbar-right", hbar_right, "ħ of the right tensor factor")->check(CLI::PositiveNumber);
    verify->add_option("--json", json_path, "Write the JSON report here");
    verify->add_option("--format", format, "Report format on stdout")->check(CLI::IsMember({"text", "json"}));

    auto* tensor = app.add_subcommand("tensor", "Tensor-product worlds and brackets");
    tensor->require_subcommand(1);
    auto* classify = tensor->add_subcommand("classify", "Classify a pair of systems");
    std::string left_path;
    std::string right_path;
    classify->add_option("--left", left_path, "Left system spec (JSON)")->required()->check(CLI::ExistingFile);
    classify->add_option("--right", right_path, "Right system spec (JSON)")->required()->check(CLI::ExistingFile);
    classify->add_option("--seed", seed, "Root seed");
    classify->add_option("--json", json_path, "Write the JSON report here");
    classify->add_option("--format", format, "Report format on stdout")->check(CLI::IsMember({"text", "json"}));

    auto* jacobi = tensor->add_subcommand("jacobi", "Jacobi identity of a tensor-product bracket");
    std::string bracket;
    std::string world;
    int jacobi_trials = 20;
    jacobi->add_option("--bracket", bracket, "product, symmetrized, generalized (or eq81, eq82, eq86)")
        ->required()
        ->check(CLI::IsMember({"product", "symmetrized", "generalized", "eq81", "eq82", "eq86"}));
    jacobi->add_option("--case", world, "commutative, quantum, or mixed")
        ->required()
        ->check(CLI::IsMember({"commutative", "quantum", "mixed"}));
    jacobi->add_option("--trials", jacobi_trials, "Random triples")->check(CLI::PositiveNumber);
    jacobi->add_option("--seed", seed, "Root seed");
    jacobi->add_option("--json", json_path, "Write the JSON report here");
    jacobi->add_option("--format", format, "Report format on stdout")->check(CLI::IsMember({"text", "json"}));

    auto* dynamics = app.add_subcommand("dynamics", "Time evolution");
    dynamics->require_subcommand(1);
    auto* run = dynamics->add_subcommand("run", "Evolve a system spec and write its trajectory");
    std::string spec_path;
    std::string out_path;
    run->add_option("--spec", spec_path, "System spec (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_path, "Trajectory CSV")->required();
    run->add_option("--seed", seed, "Root seed");
    run->add_option("--json", json_path, "Write the JSON report here");
    run->add_option("--format", format, "Report format on stdout")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kSpecError;
    }

    try {
        if (verify->parsed()) {
            VerifyOptions options;
            options.target = target;
            if (!algebra_text.empty()) options.algebra = parse_algebra(algebra_text, default_tolerance());
            options.trials = trials;
            options.seed = seed;
            if (hbar > 0.0) options.hbar = hbar;
            if (hbar_right > 0.0) options.right_hbar = hbar_right;
            return finish(run_verify(options), json_path, format);
        }
        if (classify->parsed()) {
            const auto left = structure_from_file(left_path, "--left");
            const auto right = structure_from_file(right_path, "--right");
            return finish(classify_report(left, right, seed), json_path, format);
        }
        if (jacobi->parsed()) return finish(jacobi_report(bracket, world, jacobi_trials, seed), json_path, format);
        if (run->parsed()) {
            const auto spec = load_system_spec(spec_path, default_tolerance());
            std::ofstream csv(out_path);
            if (!csv) throw SpecParseError("--out", "cannot write " + out_path);
            return finish(run_dynamics(spec, &csv, seed), json_path, format);
        }
    } catch (const SpecParseError& e) {
        print_error("SpecParseError", e.what(), Json{{"field", e.field()}});
        return kSpecError;
    } catch (const ForbiddenCoupling& e) {
        print_error("ForbiddenCoupling", e.what(), Json{{"verdict", e.verdict()}});
        return kForbidden;
    } catch (const StepTooLarge& e) {
        print_error("StepTooLarge", e.what(), Json{{"estimate", e.estimate()}});
        return kFailure;
    } catch (const Error& e) {
        print_error("Error", e.what());
        return kFailure;
    }
    return kFailure;
}
