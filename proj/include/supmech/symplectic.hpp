#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "supmech/forms.hpp"
#include "supmech/morphism.hpp"

namespace supmech {

inline constexpr double kRankThreshold = 1e-8;

/// A 2-form together with a factorized solver for i_Y ω = −dA over the
/// derivation space of its basis. The solver is built on construction.
///
/// The solver requires every form entry to be constant in the central
/// variables, so the algebra-valued equations split into one scalar
/// least-squares system per central monomial of dA.
class SymplecticStructure {
   public:
    /// `label` names the structure in reports ("canonical", "quantum", ...).
    explicit SymplecticStructure(DifferentialForm form, std::string label = "custom",
                                 std::optional<double> hbar = std::nullopt);

    const DifferentialForm& form() const { return form_; }
    const DerivationBasis& basis() const { return form_.basis(); }
    const AlgebraDescriptor& algebra() const { return form_.algebra(); }
    const std::string& label() const { return label_; }
    /// ħ for quantum structures.
    std::optional<double> hbar() const { return hbar_; }

    /// Rank of the scalar solver operator.
    std::size_t rank() const;

    /// Central coefficients of Y_A in the basis.
    std::vector<AlgebraElement> hamiltonian_coefficients(const AlgebraElement& a) const;
    /// Y_A with i_{Y_A} ω = −dA. Throws NotUnique or NonDegeneracyFailure.
    Derivation hamiltonian_derivation(const AlgebraElement& a) const;
    /// {A, B} = Y_A(B).
    AlgebraElement poisson_bracket(const AlgebraElement& a, const AlgebraElement& b) const;

   private:
    struct Solver;
    DifferentialForm form_;
    std::string label_;
    std::optional<double> hbar_;
    std::shared_ptr<const Solver> solver_;
};

/// ω_c(D_A, D_B) = [A, B] over the Gell-Mann basis. Throws NotSpecial off matrix algebras.
DifferentialForm canonical_form(const AlgebraDescriptor& algebra);
/// ω_Q = −iħ ω_c.
SymplecticStructure quantum_form(const AlgebraDescriptor& algebra, double hbar = 1.0);
/// b ω_c for a general parameter b.
SymplecticStructure scaled_canonical_form(const AlgebraDescriptor& algebra, Complex b);
/// ω_cl = Σ_j dp_j ∧ dq^j over the coordinate basis.
SymplecticStructure classical_form(const AlgebraDescriptor& algebra);

Derivation hamiltonian_derivation(const SymplecticStructure& s, const AlgebraElement& a);
AlgebraElement poisson_bracket(const SymplecticStructure& s, const AlgebraElement& a, const AlgebraElement& b);

struct SymplecticReport {
    double closed_residual = 0.0;
    std::size_t rank = 0;
    std::size_t dimension = 0;
    /// i_X ω = 0 forces X = 0 on the derivation space.
    bool nondegenerate = false;
    /// Every element of a spanning sample has a Hamiltonian derivation.
    bool all_sampled_solvable = false;
    std::size_t unsolvable_samples = 0;
};

SymplecticReport verify_symplectic(const SymplecticStructure& s);

bool is_canonical_transformation(const AlgebraMorphism& phi, const SymplecticStructure& s);
/// Entrywise distance between Φ*ω and ω.
double canonical_transformation_defect(const AlgebraMorphism& phi, const SymplecticStructure& s);

/// δB = ε {G, B}.
AlgebraElement infinitesimal_canonical_change(const SymplecticStructure& s, const AlgebraElement& generator,
                                              const AlgebraElement& b, double epsilon);

/// b ω_c restricted to the Lie subalgebra spanned by D_g for the given generators.
/// Throws NotLieSubalgebra.
SymplecticStructure generalized_pair(const AlgebraDescriptor& algebra, const std::vector<AlgebraElement>& generators,
                                     Complex b);

/// Spin-s matrices (S_x, S_y, S_z) with [S_x, S_y] = iħ S_z, of size 2s+1.
std::vector<Matrix> spin_matrices(double s, double hbar = 1.0);

/// A structure, a Hermitian Hamiltonian, and the flow Y_H.
class HamiltonianSystem {
   public:
    HamiltonianSystem(std::shared_ptr<const SymplecticStructure> structure, AlgebraElement hamiltonian);
    /// A system whose flow is supplied directly (used for coupled systems).
    HamiltonianSystem(AlgebraElement hamiltonian, Derivation flow, std::string description);

    const AlgebraElement& hamiltonian() const { return hamiltonian_; }
    const AlgebraDescriptor& algebra() const { return hamiltonian_.algebra(); }
    /// Y_H, so that dA/dt = Y_H(A) = {H, A}.
    const Derivation& flow() const { return flow_; }
    const std::shared_ptr<const SymplecticStructure>& structure() const { return structure_; }
    const std::string& description() const { return description_; }

   private:
    std::shared_ptr<const SymplecticStructure> structure_;
    AlgebraElement hamiltonian_;
    Derivation flow_;
    std::string description_;
};

}  // namespace supmech
