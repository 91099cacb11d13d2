#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supmech/algebra.hpp"

namespace supmech {

class AlgebraMorphism;

using LinearMap = std::function<AlgebraElement(const AlgebraElement&)>;

inline constexpr int kDefaultFieldDegreeBound = 6;

/// A derivation of an algebra. Values are immutable handles to shared nodes,
/// so copies are cheap and basis membership can be decided by identity.
class Derivation {
   public:
    enum class Kind { Zero, Inner, Field, Lift, Combination, Function };
    enum class Side { Left, Right };

    using Term = struct DerivationTerm;

    Derivation();

    static Derivation zero(const AlgebraDescriptor& algebra);
    /// D_g = [g, ·]. Matrix generators are stored trace-free.
    static Derivation inner(const AlgebraElement& generator);
    /// Σ_a components[a] ∂/∂ξ^a on a polynomial algebra.
    static Derivation field(const AlgebraDescriptor& algebra, std::vector<Polynomial> components,
                            int degree_bound = kDefaultFieldDegreeBound);
    /// ∂/∂ξ^index.
    static Derivation coordinate_field(const AlgebraDescriptor& algebra, int index);
    /// X ⊗ id on Tensor(x.algebra(), right).
    static Derivation lift_left(const Derivation& x, const AlgebraDescriptor& right);
    /// id ⊗ X on Tensor(left, x.algebra()).
    static Derivation lift_right(const AlgebraDescriptor& left, const Derivation& x);
    /// Σ c_t X_t with central coefficients c_t.
    static Derivation combination(const AlgebraDescriptor& algebra, std::vector<Term> terms);
    /// Arbitrary linear map that the caller asserts is a derivation.
    static Derivation function(const AlgebraDescriptor& algebra, LinearMap map, std::string label);

    Kind kind() const;
    const AlgebraDescriptor& algebra() const;
    const AlgebraElement& generator() const;
    const std::vector<Polynomial>& components() const;
    Side side() const;
    const Derivation& lifted() const;
    const std::vector<Term>& terms() const;
    const std::string& label() const;

    AlgebraElement apply(const AlgebraElement& a) const;
    AlgebraElement operator()(const AlgebraElement& a) const { return apply(a); }

    /// Identity of the shared node.
    bool same_node(const Derivation& other) const { return node_ == other.node_; }

    std::string to_string() const;

   private:
    struct Node;
    explicit Derivation(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct DerivationTerm {
    AlgebraElement coefficient;  // central
    Derivation derivation;
};

Derivation inner_derivation(const AlgebraElement& generator);
AlgebraElement apply(const Derivation& x, const AlgebraElement& a);
Derivation lie_bracket(const Derivation& x, const Derivation& y);
/// X*(A) = [X(A*)]*.
Derivation derivation_star(const Derivation& x);
Derivation scale(Complex z, const Derivation& x);
Derivation add(const Derivation& x, const Derivation& y);
/// (Φ_* X)(B) = Φ(X(Φ⁻¹ B)).
Derivation push_forward(const AlgebraMorphism& phi, const Derivation& x);

/// Elements on which two derivations are compared: a standard basis plus a few random elements.
std::vector<AlgebraElement> probe_elements(const AlgebraDescriptor& algebra, std::uint64_t seed = 7);
/// Largest action difference over probe_elements.
double action_distance(const Derivation& x, const Derivation& y);

struct LeibnizReport {
    bool is_derivation = true;
    double max_residual = 0.0;
    std::size_t samples = 0;
    /// Worst pair when the rule fails.
    std::optional<std::pair<AlgebraElement, AlgebraElement>> witness;
};

/// Checks the Leibniz rule for `map` on all pairs of standard basis elements
/// (monomials up to degree 2 for polynomial factors) plus seeded random
/// products, at least 50 pairs in total. Throws NotLinear first if the map
/// fails linearity on random combinations.
LeibnizReport check_derivation(const AlgebraDescriptor& algebra, const LinearMap& map, std::uint64_t seed = 1,
                               std::optional<double> tolerance = std::nullopt);
LeibnizReport check_derivation(const Derivation& x, std::uint64_t seed = 1);

/// An ordered family of derivations over which forms are stored, together with
/// its structure constants [X_i, X_j] = Σ_k c^k_ij X_k and the involution table
/// X_i* = Σ_k s^k_i X_k. Coefficients are complex scalars for every basis built here.
///
/// The basis splits into a field part (derivations dual to the central
/// coordinates) and an inner part (inner derivations by constant generators).
/// Arbitrary derivations are expanded by reading the field part off the
/// central coordinates and fitting the inner part by least squares on matrix
/// units of the matrix part.
class DerivationBasis {
   public:
    /// Inner derivations of the generalized Gell-Mann matrices (Frobenius norm √2).
    static DerivationBasis gell_mann(const AlgebraDescriptor& algebra);
    /// Coordinate derivations ∂/∂ξ^a.
    static DerivationBasis coordinate(const AlgebraDescriptor& algebra);
    /// The natural basis: Gell-Mann, coordinate, or the product of the factors' natural bases.
    static DerivationBasis natural(const AlgebraDescriptor& algebra);
    /// Lifts of the left basis followed by lifts of the right basis.
    static DerivationBasis product(const DerivationBasis& left, const DerivationBasis& right);
    /// Inner derivations by the given generators; throws NotLieSubalgebra
    /// unless their span is closed under the bracket.
    static DerivationBasis subalgebra(const AlgebraDescriptor& algebra, const std::vector<AlgebraElement>& generators,
                                      const std::string& name = "subalgebra");

    const AlgebraDescriptor& algebra() const;
    std::size_t size() const;
    const Derivation& operator[](std::size_t i) const;
    const std::vector<Derivation>& elements() const;
    const std::string& signature() const;

    /// c^k_ij.
    Complex structure_constant(std::size_t i, std::size_t j, std::size_t k) const;
    /// s^k_i.
    Complex star_coefficient(std::size_t i, std::size_t k) const;

    /// Central coefficients c_k with X = Σ_k c_k X_k. Throws NotInSpan.
    std::vector<AlgebraElement> expand(const Derivation& x) const;
    Derivation from_coefficients(const std::vector<AlgebraElement>& coefficients) const;

    /// Inner-part generators (empty optional for field-part entries).
    const std::optional<AlgebraElement>& inner_generator(std::size_t i) const;
    bool is_inner() const;

    /// Largest Jacobi residual of the structure constants.
    double jacobi_residual() const;

    friend bool operator==(const DerivationBasis& a, const DerivationBasis& b) {
        return a.signature() == b.signature();
    }
    friend bool operator!=(const DerivationBasis& a, const DerivationBasis& b) { return !(a == b); }

   private:
    struct Data;
    explicit DerivationBasis(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    static DerivationBasis build(const AlgebraDescriptor& algebra, std::vector<Derivation> elements,
                                 std::vector<int> field_variable, std::vector<std::optional<AlgebraElement>> inner,
                                 std::string signature, bool check_closure);
    std::shared_ptr<const Data> data_;
};

/// Generalized Gell-Mann matrices: symmetric and antisymmetric off-diagonal
/// pairs for j < k, then diagonal ones.
std::vector<Matrix> gell_mann_matrices(int n);

/// Random Σ c_k X_k with scalar coefficients (matrix part) or polynomial
/// coefficients up to `max_degree` (polynomial part).
Derivation random_derivation(const DerivationBasis& basis, Rng& rng, int max_degree = 1);

}  // namespace supmech
