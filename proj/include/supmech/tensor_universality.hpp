#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "supmech/symplectic.hpp"

namespace supmech {

/// One factor of a candidate term: a derivation, or left multiplication μ(C).
struct FactorOperator {
    enum class Kind { Derivation, Multiplication };
    Kind kind;
    std::optional<Derivation> derivation;
    std::optional<AlgebraElement> multiplier;

    static FactorOperator of(const Derivation& x) { return {Kind::Derivation, x, std::nullopt}; }
    static FactorOperator mu(const AlgebraElement& c) { return {Kind::Multiplication, std::nullopt, c}; }
    AlgebraElement apply(const AlgebraElement& a) const;
};

/// A formal sum Σ s_t (L_t ⊗ R_t) acting term-wise on tensor elements.
class CandidateOperator {
   public:
    struct Term {
        Complex scale;
        FactorOperator left;
        FactorOperator right;
    };

    CandidateOperator(AlgebraDescriptor algebra, std::vector<Term> terms)
        : algebra_(std::move(algebra)), terms_(std::move(terms)) {}

    const AlgebraDescriptor& algebra() const { return algebra_; }
    const std::vector<Term>& terms() const { return terms_; }
    AlgebraElement apply(const AlgebraElement& a) const;
    LinearMap as_map() const;

   private:
    AlgebraDescriptor algebra_;
    std::vector<Term> terms_;
};

/// Y = Y_A ⊗ μ(B) + μ(A) ⊗ Y_B + λ Y_A ⊗ Y_B.
CandidateOperator product_candidate(const Derivation& y_a, const AlgebraElement& a, const Derivation& y_b,
                                    const AlgebraElement& b, Complex lambda);

/// ω⁽¹⁾ ⊗ I₂ + I₁ ⊗ ω⁽²⁾ over the lifted product basis.
DifferentialForm product_form(const SymplecticStructure& left, const SymplecticStructure& right);

/// Least-squares solution of λ x = y over sampled pairs, skipping pairs with ‖x‖ < 10·tol.
struct LambdaExtraction {
    std::optional<Complex> lambda;
    /// Largest relative deviation ‖λ x − y‖ / max(1, ‖y‖) over the used pairs.
    double residual = 0.0;
    std::size_t pairs_used = 0;
    std::size_t pairs_skipped = 0;
};

/// Extracts λ from λ {A, C} = [C, A] with C drawn from a seeded sample.
LambdaExtraction extract_lambda(const SymplecticStructure& s, const AlgebraElement& a, std::uint64_t seed,
                                int samples = 50);
/// Same with A drawn from the sample as well.
LambdaExtraction extract_lambda(const SymplecticStructure& s, std::uint64_t seed, int samples = 50);

enum class WorldVerdict { BothCommutative, BothQuantum, Inconsistent };
std::string to_string(WorldVerdict verdict);

struct WorldClassification {
    WorldVerdict verdict = WorldVerdict::Inconsistent;
    Complex lambda{};
    /// Empty unless Inconsistent: "mixed-case", "lambda-inconsistent", "non-special", "not-quantum".
    std::string reason;
    /// Fitted ω⁽ⁱ⁾ = β_i ω_c coefficients and residuals (noncommutative factors only).
    std::optional<Complex> left_beta;
    std::optional<Complex> right_beta;
    double left_fit_residual = 0.0;
    double right_fit_residual = 0.0;
    LambdaExtraction left_extraction;
    LambdaExtraction right_extraction;
};

WorldClassification classify_worlds(const SymplecticStructure& left, const SymplecticStructure& right,
                                    std::uint64_t seed = 11);

struct ProductHamiltonianResult {
    bool success = false;
    /// "lambda-inconsistent", "mixed-case", or "not-derivation" on failure.
    std::string failure_stage;
    std::optional<Complex> lambda;
    std::optional<Derivation> derivation;
    LambdaExtraction left_extraction;
    LambdaExtraction right_extraction;
    /// Derivation checks of every candidate that was constructed.
    std::vector<std::pair<Complex, LeibnizReport>> candidates;
};

ProductHamiltonianResult solve_product_hamiltonian(const SymplecticStructure& left, const SymplecticStructure& right,
                                                   const AlgebraElement& a, const AlgebraElement& b,
                                                   std::uint64_t seed = 13);

using Bracket = std::function<AlgebraElement(const AlgebraElement&, const AlgebraElement&)>;

/// {A⊗B, C⊗D} = {A,C}₁⊗BD + AC⊗{B,D}₂ + λ{A,C}₁⊗{B,D}₂. Throws UnclassifiedWorld.
AlgebraElement product_pb(const SymplecticStructure& left, const SymplecticStructure& right,
                          const WorldClassification& world, const AlgebraElement& u, const AlgebraElement& v);
/// {A⊗B, C⊗D} = {A,C}₁⊗(BD+DB)/2 + (AC+CA)/2⊗{B,D}₂.
AlgebraElement symmetrized_pb(const SymplecticStructure& left, const SymplecticStructure& right,
                              const AlgebraElement& u, const AlgebraElement& v);
/// {fA, gB} = b⁻¹ fg [A, B] on Tensor(Polynomial, Matrix). Throws ZeroParameter.
AlgebraElement generalized_mixed_pb(Complex b, const AlgebraElement& u, const AlgebraElement& v);

/// {u,{v,w}} + {v,{w,u}} + {w,{u,v}}.
AlgebraElement jacobiator(const Bracket& bracket, const AlgebraElement& u, const AlgebraElement& v,
                          const AlgebraElement& w);

/// The pinned mixed-case triple for the symmetrized bracket on
/// Polynomial(1) ⊗ Matrix(2) with ω_cl and ω_Q (ħ = 1):
/// u = q⊗σx, v = p⊗σy, w = qp⊗σx, whose jacobiator is 1⊗σy.
struct MixedWitness {
    SymplecticStructure left;
    SymplecticStructure right;
    AlgebraElement u;
    AlgebraElement v;
    AlgebraElement w;
};
MixedWitness mixed_witness();

}  // namespace supmech
