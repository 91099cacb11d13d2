#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "supmech/report.hpp"
#include "supmech/system_spec.hpp"

namespace supmech {

/// Suites draw per-case seeds from derive_seed(seed, case name), so one seed
/// reproduces every case independently of the others.
SuiteReport run_calculus_suite(const AlgebraDescriptor& algebra, int trials, std::uint64_t seed);
/// `hbar` empty means ħ ∈ {0.5, 1, 2} on matrix algebras.
SuiteReport run_symplectic_suite(const AlgebraDescriptor& algebra, int trials, std::uint64_t seed,
                                 std::optional<double> hbar = std::nullopt);
SuiteReport run_tensor_suite(const SymplecticStructure& left, const SymplecticStructure& right, int trials,
                             std::uint64_t seed);
SuiteReport run_dynamics_suite(const AlgebraDescriptor& algebra, int trials, std::uint64_t seed);

struct VerifyOptions {
    /// calculus, symplectic, tensor, or dynamics.
    std::string target;
    std::optional<AlgebraDescriptor> algebra;
    int trials = 100;
    std::uint64_t seed = 1;
    std::optional<double> hbar;
    /// ħ of the right factor in the tensor suite, when it differs.
    std::optional<double> right_hbar;
};

/// Dispatches to the suite for `target`. Tensor algebras in the tensor suite get
/// the quantum form on matrix factors and the classical form on polynomial ones.
/// Throws SpecParseError on an unknown target or unsuitable algebra.
SuiteReport run_verify(const VerifyOptions& options);

/// Evolves the spec's state, writes the trajectory CSV to `csv` when given,
/// and reports conservation residuals. Throws ForbiddenCoupling, StepTooLarge, SpecParseError.
SuiteReport run_dynamics(const SystemSpec& spec, std::ostream* csv, std::uint64_t seed = 11);

/// One "classify" case; failing (expected) when the worlds are inconsistent.
SuiteReport classify_report(const SymplecticStructure& left, const SymplecticStructure& right, std::uint64_t seed = 11);

/// Jacobi check of "product", "symmetrized", or "generalized" on the
/// "commutative", "quantum", or "mixed" pair of worlds.
SuiteReport jacobi_report(const std::string& bracket, const std::string& world, int trials, std::uint64_t seed);

}  // namespace supmech
