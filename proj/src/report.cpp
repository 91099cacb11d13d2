#include "supmech/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "supmech/errors.hpp"

namespace supmech {

namespace {

// Non-finite values are written as the strings "inf", "-inf", "nan".
double real_from_json(const Json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    return j.get<double>();
}

}  // namespace

void SuiteReport::finalize() {
    std::stable_sort(cases.begin(), cases.end(), [](const CaseResult& a, const CaseResult& b) { return a.name < b.name; });
}

bool SuiteReport::all_passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed; });
}

int exit_code(const SuiteReport& report) {
    bool expected = false;
    for (const auto& c : report.cases) {
        if (c.passed) continue;
        if (!c.expected_failure) return 1;
        expected = true;
    }
    return expected ? 2 : 0;
}

Json to_json(const SuiteReport& report) {
    Json cases = Json::array();
    for (const auto& c : report.cases) {
        Json jc{{"name", c.name},
                {"status", c.passed ? "pass" : "fail"},
                {"expected_failure", c.expected_failure},
                {"residual", c.residual},
                {"tolerance", c.tolerance}};
        if (c.witness) jc["witness"] = *c.witness;
        if (!c.details.empty()) jc["details"] = c.details;
        cases.push_back(std::move(jc));
    }
    return Json{{"suiteName", report.suite},
                {"seed", report.seed},
                {"toolVersion", report.tool_version},
                {"parameters", report.parameters},
                {"cases", cases},
                {"wallTimeMs", report.wall_time_ms}};
}

SuiteReport report_from_json(const Json& j) {
    try {
        SuiteReport r;
        r.suite = j.at("suiteName").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.tool_version = j.at("toolVersion").get<std::string>();
        r.parameters = j.value("parameters", Json::object());
        r.wall_time_ms = j.at("wallTimeMs").get<double>();
        for (const auto& jc : j.at("cases")) {
            CaseResult c;
            c.name = jc.at("name").get<std::string>();
            c.passed = jc.at("status").get<std::string>() == "pass";
            c.expected_failure = jc.value("expected_failure", false);
            c.residual = real_from_json(jc.at("residual"));
            c.tolerance = real_from_json(jc.at("tolerance"));
            if (jc.contains("witness")) c.witness = jc["witness"];
            c.details = jc.value("details", Json::object());
            r.cases.push_back(std::move(c));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SpecParseError("report", e.what());
    }
}

std::string emit_report(const SuiteReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) return dump_json(to_json(report)) + "\n";
    std::ostringstream os;
    std::size_t passed = 0;
    for (const auto& c : report.cases) passed += c.passed;
    os << report.suite << " (seed " << report.seed << "): " << passed << "/" << report.cases.size() << " passed\n";
    for (const auto& c : report.cases) {
        char line[256];
        std::snprintf(line, sizeof line, "  %-6s %-36s residual %.3e  tol %.1e%s\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.residual, c.tolerance,
                      c.passed ? "" : (c.expected_failure ? "  (expected)" : ""));
        os << line;
    }
    return os.str();
}

double default_tolerance() {
    if (const char* env = std::getenv("SUPMECH_TOLERANCE")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v > 0.0) return v;
        throw SpecParseError("SUPMECH_TOLERANCE", std::string("not a positive number: ") + env);
    }
    return kDefaultTolerance;
}

}  // namespace supmech
