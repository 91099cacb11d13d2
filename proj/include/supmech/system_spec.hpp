#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supmech/dynamics.hpp"
#include "supmech/serialization.hpp"

namespace supmech {

/// "quantum" (with ħ), "classical", "canonical", or "scaled" (with b).
struct StructureSpec {
    std::string kind = "quantum";
    double hbar = 1.0;
    Complex b = 1.0;
};

struct TrackedObservable {
    std::string name;
    AlgebraElement value;
};

/// A parsed system document:
///   {algebra, form, hbar?, hamiltonian?, interaction?, state?, evolution?, track?}
/// On tensor algebras `form` and `hamiltonian` are {"left": .., "right": ..}.
struct SystemSpec {
    explicit SystemSpec(AlgebraDescriptor a) : algebra(std::move(a)) {}

    AlgebraDescriptor algebra;
    StructureSpec form;
    StructureSpec right_form;
    std::optional<AlgebraElement> hamiltonian;
    std::optional<AlgebraElement> right_hamiltonian;
    std::vector<InteractionTerm> interaction;
    std::optional<StateFunctional> state;
    std::optional<EvolutionConfig> evolution;
    std::vector<TrackedObservable> track;

    bool is_coupled() const { return algebra.is_tensor(); }
};

/// Validates the document; throws SpecParseError naming the offending field.
SystemSpec parse_system_spec(const Json& j, double tolerance = kDefaultTolerance);
SystemSpec load_system_spec(const std::string& path, double tolerance = kDefaultTolerance);
/// Throws SpecParseError with the line of a JSON syntax error.
Json load_json_file(const std::string& path);

StructureSpec parse_structure_spec(const Json& j, std::optional<double> default_hbar, const std::string& field);
SymplecticStructure build_structure(const AlgebraDescriptor& algebra, const StructureSpec& spec);

/// The (possibly coupled) system described by the spec. Throws ForbiddenCoupling.
HamiltonianSystem build_system(const SystemSpec& spec, std::uint64_t seed = 11);

}  // namespace supmech
