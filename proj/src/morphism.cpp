#include "supmech/morphism.hpp"

#include "supmech/errors.hpp"

namespace supmech {

AlgebraMorphism AlgebraMorphism::identity(const AlgebraDescriptor& algebra) { return AlgebraMorphism(algebra); }

AlgebraMorphism AlgebraMorphism::unitary_conjugation(const AlgebraDescriptor& algebra, const Matrix& u) {
    auto dim = algebra.flat_dimension();
    if (!dim) throw NotIsomorphism("unitary conjugation needs a matrix algebra, got " + algebra.to_string());
    if (u.rows() != *dim || u.cols() != *dim) throw NotIsomorphism("unitary has the wrong size");
    const double defect = (u.adjoint() * u - Matrix::Identity(*dim, *dim)).norm();
    if (defect > 1e-9) throw NotIsomorphism("matrix is not unitary (defect " + std::to_string(defect) + ")");
    AlgebraMorphism m(algebra);
    m.kind_ = Kind::UnitaryConjugation;
    m.unitary_ = u;
    return m;
}

AlgebraMorphism AlgebraMorphism::affine_substitution(const AlgebraDescriptor& algebra, const Eigen::MatrixXd& linear,
                                                     const Eigen::VectorXd& offset) {
    if (!algebra.is_polynomial()) throw NotIsomorphism("affine substitution needs a polynomial algebra");
    const int nv = algebra.num_variables();
    if (linear.rows() != nv || linear.cols() != nv || offset.size() != nv) {
        throw NotIsomorphism("affine map has the wrong size");
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(linear);
    if (!lu.isInvertible()) throw NotIsomorphism("affine map is not invertible");
    AlgebraMorphism m(algebra);
    m.kind_ = Kind::AffineSubstitution;
    m.linear_ = linear;
    m.offset_ = offset;
    return m;
}

AlgebraElement AlgebraMorphism::apply(const AlgebraElement& a) const {
    if (a.algebra() != algebra_) throw AlgebraMismatch("morphism source is " + algebra_.to_string());
    switch (kind_) {
        case Kind::Identity:
            return a;
        case Kind::UnitaryConjugation:
            return unflatten(a.algebra(), unitary_ * flatten(a) * unitary_.adjoint());
        case Kind::AffineSubstitution:
            return AlgebraElement(a.algebra(), a.polynomial().compose_affine(linear_, offset_));
        case Kind::Composite: {
            AlgebraElement out = a;
            for (const auto& part : parts_) out = part.apply(out);
            return out;
        }
    }
    throw Error("unknown morphism kind");
}

AlgebraMorphism AlgebraMorphism::inverse() const {
    switch (kind_) {
        case Kind::Identity:
            return *this;
        case Kind::UnitaryConjugation:
            return unitary_conjugation(algebra_, unitary_.adjoint());
        case Kind::AffineSubstitution: {
            // f(Mξ + c) = g  ⇔  f(ξ) = g(M⁻¹ξ − M⁻¹c)
            Eigen::MatrixXd inv = linear_.inverse();
            return affine_substitution(algebra_, inv, -inv * offset_);
        }
        case Kind::Composite: {
            AlgebraMorphism m(algebra_);
            m.kind_ = Kind::Composite;
            for (auto it = parts_.rbegin(); it != parts_.rend(); ++it) m.parts_.push_back(it->inverse());
            return m;
        }
    }
    throw Error("unknown morphism kind");
}

AlgebraMorphism compose(const AlgebraMorphism& outer, const AlgebraMorphism& inner) {
    if (outer.source() != inner.target()) throw AlgebraMismatch("cannot compose morphisms of different algebras");
    AlgebraMorphism m(inner.source());
    m.kind_ = AlgebraMorphism::Kind::Composite;
    auto append = [&](const AlgebraMorphism& part) {
        if (part.kind_ == AlgebraMorphism::Kind::Composite) {
            m.parts_.insert(m.parts_.end(), part.parts_.begin(), part.parts_.end());
        } else if (part.kind_ != AlgebraMorphism::Kind::Identity) {
            m.parts_.push_back(part);
        }
    };
    append(inner);
    append(outer);
    return m;
}

double morphism_residual(const AlgebraMorphism& phi, std::uint64_t seed) {
    Rng rng(seed);
    const auto& alg = phi.source();
    double worst = (phi(AlgebraElement::unit(alg)) - AlgebraElement::unit(alg)).norm();
    for (int t = 0; t < 20; ++t) {
        auto a = random_element(alg, rng);
        auto b = random_element(alg, rng);
        worst = std::max(worst, (phi(a * b) - phi(a) * phi(b)).norm());
        worst = std::max(worst, (phi(star(a)) - star(phi(a))).norm());
    }
    return worst;
}

}  // namespace supmech
