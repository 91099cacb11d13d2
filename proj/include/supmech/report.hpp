#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supmech/serialization.hpp"

namespace supmech {

inline constexpr const char* kToolVersion = "0.1.0";

struct CaseResult {
    std::string name;
    bool passed = false;
    /// A failure the theory predicts (a forbidden world or a broken identity it rules out).
    bool expected_failure = false;
    double residual = 0.0;
    double tolerance = 0.0;
    /// Serialized elements that exhibit a failure.
    std::optional<Json> witness;
    /// Case-specific numbers such as λ or verdicts.
    Json details = Json::object();
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    Json parameters = Json::object();
    std::vector<CaseResult> cases;
    double wall_time_ms = 0.0;

    /// Sorts cases by name.
    void finalize();
    bool all_passed() const;
};

/// 0 when every case passes, 2 when the only failures are expected ones, 1 otherwise.
int exit_code(const SuiteReport& report);

Json to_json(const SuiteReport& report);
SuiteReport report_from_json(const Json& j);

enum class ReportFormat { Json, Text };
std::string emit_report(const SuiteReport& report, ReportFormat format);

/// Default equality tolerance, overridden by SUPMECH_TOLERANCE.
double default_tolerance();

}  // namespace supmech
