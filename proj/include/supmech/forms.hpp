#pragma once

#include <vector>

#include "supmech/derivation.hpp"

namespace supmech {

class AlgebraMorphism;

/// A Z(A)-multilinear antisymmetric p-form over a derivation basis, stored by
/// its values on strictly increasing basis index tuples (in colex order).
/// Values on other tuples follow from antisymmetry; values on arbitrary
/// derivations follow from Z(A)-linearity after expansion in the basis.
class DifferentialForm {
   public:
    /// The zero p-form.
    DifferentialForm(DerivationBasis basis, int degree);
    /// A 0-form, i.e. an algebra element.
    static DifferentialForm function(DerivationBasis basis, const AlgebraElement& value);

    int degree() const { return degree_; }
    const DerivationBasis& basis() const { return basis_; }
    const AlgebraDescriptor& algebra() const { return basis_.algebra(); }

    std::size_t entry_count() const { return values_.size(); }
    /// All increasing index tuples, in storage order.
    std::vector<std::vector<int>> index_tuples() const;
    const std::vector<AlgebraElement>& values() const { return values_; }

    /// Value on basis derivations with the given indices, in any order.
    AlgebraElement at(const std::vector<int>& indices) const;
    /// Sets the value on the given indices (any order; the sign is applied).
    void set(const std::vector<int>& indices, const AlgebraElement& value);

    AlgebraElement evaluate(const std::vector<Derivation>& arguments) const;
    /// Evaluates on Σ_k c[slot][k] X_k in every slot.
    AlgebraElement evaluate_coefficients(const std::vector<std::vector<AlgebraElement>>& coefficients) const;

    /// Largest entry norm.
    double max_norm() const;

    DifferentialForm& operator+=(const DifferentialForm& other);
    DifferentialForm& operator-=(const DifferentialForm& other);
    DifferentialForm& operator*=(Complex s);
    friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
    friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
    friend DifferentialForm operator*(Complex s, DifferentialForm a) { return a *= s; }

   private:
    std::size_t storage_index(const std::vector<int>& increasing) const;

    DerivationBasis basis_;
    int degree_;
    std::vector<AlgebraElement> values_;
};

/// Strictly increasing p-subsets of {0..m-1} in colex order.
std::vector<std::vector<int>> increasing_tuples(int m, int p);

AlgebraElement evaluate(const DifferentialForm& form, const std::vector<Derivation>& arguments);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm exterior_derivative(const DifferentialForm& a);
DifferentialForm lie_derivative(const Derivation& y, const DifferentialForm& a);
/// Throws DegreeZero for 0-forms.
DifferentialForm interior_product(const Derivation& x, const DifferentialForm& a);
/// ω*(X_1..X_p) = [ω(X_1*..X_p*)]*.
DifferentialForm form_star(const DifferentialForm& a);
/// (Φ*ω)(X_1..X_p) = Φ⁻¹[ω(Φ_*X_1, .., Φ_*X_p)], with the result stored on `source_basis`.
DifferentialForm pull_back(const AlgebraMorphism& phi, const DifferentialForm& form,
                           const DerivationBasis& source_basis);
/// Pull-back along an automorphism, keeping the form's own basis.
DifferentialForm pull_back(const AlgebraMorphism& phi, const DifferentialForm& form);

/// Largest entrywise norm difference. Throws BasisMismatch.
double form_distance(const DifferentialForm& a, const DifferentialForm& b);
bool approx_equal(const DifferentialForm& a, const DifferentialForm& b, double tolerance);

/// Random form with entries from random_element(.., max_degree).
DifferentialForm random_form(const DerivationBasis& basis, int degree, Rng& rng, int max_degree = 2);

}  // namespace supmech
