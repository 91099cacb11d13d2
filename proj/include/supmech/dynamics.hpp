#pragma once

#include <vector>

#include "supmech/states.hpp"
#include "supmech/tensor_universality.hpp"

namespace supmech {

enum class EvolutionMethod { RK4, ExactConjugation };

struct EvolutionConfig {
    double t_end = 1.0;
    double dt = 1e-3;
    EvolutionMethod method = EvolutionMethod::RK4;
    /// Bound on the step-doubling estimate of the RK4 local error, relative to max(1, ‖state‖).
    double error_bound = 1e-6;
    /// Steps between local error checks.
    int check_interval = 100;
    /// Steps between recorded samples; the final time is always recorded.
    int record_every = 1;
};

template <class T>
struct TimeSeries {
    std::vector<double> times;
    std::vector<T> values;
};

using ObservableSeries = TimeSeries<AlgebraElement>;
using StateSeries = TimeSeries<StateFunctional>;

/// dA/dt = {H, A}. Matrix-like algebras integrate the linear flow directly;
/// polynomial algebras integrate phase points and compose A₀ with the flow
/// map, which stays polynomial only for Hamiltonians of degree ≤ 2.
/// Throws StepTooLarge, DegreeBoundExceeded, Unsupported.
ObservableSeries evolve_observable(const HamiltonianSystem& sys, const AlgebraElement& a0, const EvolutionConfig& cfg);

/// The dual evolution ⟨φ(t), A⟩ = ⟨φ, A(t)⟩: density matrices follow
/// dρ/dt = −Y_H(ρ), phase ensembles follow Hamilton's equations pointwise.
StateSeries evolve_state(const HamiltonianSystem& sys, const StateFunctional& phi0, const EvolutionConfig& cfg);

/// Hamilton's equations dξ^i/dt = {H, ξ^i} for one phase point.
TimeSeries<std::vector<double>> evolve_point(const HamiltonianSystem& sys, const std::vector<double>& x0,
                                             const EvolutionConfig& cfg);

struct InteractionTerm {
    AlgebraElement left;
    AlgebraElement right;
};

/// H = H₁⊗I + I⊗H₂ + Σ Fᵢ⊗Gᵢ with the flow of the product structure.
/// Throws ForbiddenCoupling when the worlds are not compatible.
HamiltonianSystem coupled_system(const HamiltonianSystem& first, const HamiltonianSystem& second,
                                 const std::vector<InteractionTerm>& interaction, std::uint64_t seed = 11);

/// The matrix of the flow A ↦ Y_H(A) on column-major coordinates (matrix-like algebras only).
Matrix flow_superoperator(const Derivation& flow);

}  // namespace supmech
