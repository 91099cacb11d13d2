#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "supmech/algebra.hpp"

namespace supmech {

/// A *-isomorphism between algebras: unitary conjugation A ↦ U A U* on
/// matrix (or flattenable tensor) algebras, or the affine substitution
/// f ↦ f(Mξ + c) on polynomial algebras, and compositions of these.
class AlgebraMorphism {
   public:
    enum class Kind { Identity, UnitaryConjugation, AffineSubstitution, Composite };

    static AlgebraMorphism identity(const AlgebraDescriptor& algebra);
    /// Throws NotIsomorphism unless U is unitary.
    static AlgebraMorphism unitary_conjugation(const AlgebraDescriptor& algebra, const Matrix& u);
    /// Throws NotIsomorphism unless M is invertible.
    static AlgebraMorphism affine_substitution(const AlgebraDescriptor& algebra, const Eigen::MatrixXd& linear,
                                               const Eigen::VectorXd& offset);

    Kind kind() const { return kind_; }
    const AlgebraDescriptor& source() const { return algebra_; }
    const AlgebraDescriptor& target() const { return algebra_; }
    const Matrix& unitary() const { return unitary_; }
    const Eigen::MatrixXd& linear() const { return linear_; }
    const Eigen::VectorXd& offset() const { return offset_; }

    AlgebraElement apply(const AlgebraElement& a) const;
    AlgebraElement operator()(const AlgebraElement& a) const { return apply(a); }
    AlgebraMorphism inverse() const;

   private:
    explicit AlgebraMorphism(AlgebraDescriptor algebra) : algebra_(std::move(algebra)) {}

    Kind kind_ = Kind::Identity;
    AlgebraDescriptor algebra_;
    Matrix unitary_;
    Eigen::MatrixXd linear_;
    Eigen::VectorXd offset_;
    std::vector<AlgebraMorphism> parts_;  // applied first to last

    friend AlgebraMorphism compose(const AlgebraMorphism& outer, const AlgebraMorphism& inner);
};

/// outer ∘ inner.
AlgebraMorphism compose(const AlgebraMorphism& outer, const AlgebraMorphism& inner);

/// Largest violation of the product, involution, and unit laws over a seeded sample.
double morphism_residual(const AlgebraMorphism& phi, std::uint64_t seed = 3);

}  // namespace supmech
