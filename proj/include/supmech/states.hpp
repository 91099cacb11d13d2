#pragma once

#include <memory>
#include <string>
#include <vector>

#include "supmech/morphism.hpp"

namespace supmech {

/// A weighted phase-space point ξ = (q¹..qⁿ, p₁..pₙ).
struct PhasePoint {
    std::vector<double> point;
    double weight = 1.0;
};

/// A normalized positive linear functional, realized concretely per backend:
/// a density matrix (matrix or flattenable tensor algebras), a weighted
/// point ensemble (polynomial algebras), or a product of two states.
class StateFunctional {
   public:
    enum class Kind { DensityMatrix, PhaseEnsemble, Product };

    /// No validation here; see is_state.
    static StateFunctional density_matrix(const AlgebraDescriptor& algebra, Matrix rho);
    /// |ψ⟩⟨ψ| for ψ normalized on the fly.
    static StateFunctional pure(const AlgebraDescriptor& algebra, const Eigen::VectorXcd& psi);
    static StateFunctional phase_point(const AlgebraDescriptor& algebra, std::vector<double> point);
    static StateFunctional phase_ensemble(const AlgebraDescriptor& algebra, std::vector<PhasePoint> points);
    static StateFunctional product(const StateFunctional& left, const StateFunctional& right);

    Kind kind() const { return kind_; }
    const AlgebraDescriptor& algebra() const { return algebra_; }
    const Matrix& density() const;
    const std::vector<PhasePoint>& points() const;
    const StateFunctional& left() const;
    const StateFunctional& right() const;

    /// Rank-one density matrix, single phase point, or product of pure states.
    bool is_pure() const;
    /// The same functional as a density matrix, for products of density matrices.
    StateFunctional as_density() const;

    std::string to_string() const;

   private:
    StateFunctional(Kind kind, AlgebraDescriptor algebra) : kind_(kind), algebra_(std::move(algebra)) {}

    Kind kind_;
    AlgebraDescriptor algebra_;
    Matrix rho_;
    std::vector<PhasePoint> points_;
    std::shared_ptr<const StateFunctional> left_;
    std::shared_ptr<const StateFunctional> right_;
};

/// φ(a). Throws AlgebraMismatch.
Complex expectation(const StateFunctional& phi, const AlgebraElement& a);

struct StateDiagnostics {
    bool is_state = true;
    /// Empty when is_state.
    std::string reason;
    double hermiticity_defect = 0.0;
    double trace_defect = 0.0;
    double min_eigenvalue = 0.0;
    /// Smallest Re φ(a*a) over random a.
    double min_positivity = 0.0;
};

StateDiagnostics is_state(const StateFunctional& phi, std::uint64_t seed = 7);

/// Σ w_k φ_k for nonnegative weights summing to one. Throws AlgebraMismatch or Unsupported.
StateFunctional mix(const std::vector<std::pair<double, StateFunctional>>& parts);

/// The state A ↦ φ(Φ(A)). Throws AlgebraMismatch or Unsupported.
StateFunctional transport_state(const AlgebraMorphism& phi, const StateFunctional& state);

/// Distance between two states of the same kind (density norm or point distance for single points).
double state_distance(const StateFunctional& a, const StateFunctional& b);

struct CCFinding {
    std::string description;
    std::string first;
    std::string second;
};

struct CCReport {
    std::size_t observable_pairs = 0;
    std::size_t observable_pairs_skipped = 0;
    std::size_t observable_unseparated = 0;
    std::size_t state_pairs = 0;
    std::size_t state_pairs_skipped = 0;
    std::size_t state_unseparated = 0;
    /// Smallest separation |φ(A) − φ(B)| (or |φ(P) − ψ(P)|) that was found.
    double min_observable_gap = 0.0;
    double min_state_gap = 0.0;
    std::vector<CCFinding> unseparated;

    bool passed() const { return observable_unseparated == 0 && state_unseparated == 0; }
};

/// A pure state with |φ(a) − φ(b)| as large as the search finds, and the gap.
std::pair<StateFunctional, double> separating_state(const AlgebraElement& a, const AlgebraElement& b,
                                                    std::uint64_t seed = 5);
/// An observable P with |φ(P) − ψ(P)| as large as the search finds, and the gap.
std::pair<AlgebraElement, double> separating_observable(const StateFunctional& phi, const StateFunctional& psi);

/// Checks compatible completeness on consecutive pairs of each sample.
CCReport cc_check(const AlgebraDescriptor& algebra, const std::vector<AlgebraElement>& observables,
                  const std::vector<StateFunctional>& pure_states, std::uint64_t seed = 5);

/// Seeded random pure state.
StateFunctional random_pure_state(const AlgebraDescriptor& algebra, Rng& rng);
/// Seeded random mixed state (a density matrix of full rank, or a 3-point ensemble).
StateFunctional random_state(const AlgebraDescriptor& algebra, Rng& rng);

}  // namespace supmech
