#include <doctest.h>

#include "oracles.hpp"
#include "supmech/derivation.hpp"
#include "supmech/errors.hpp"
#include "supmech/morphism.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto p1 = AlgebraDescriptor::polynomial(1);

}  // namespace

TEST_CASE("inner derivations act by commutator") {
    const auto y = inner_derivation(pauli_z()).apply(pauli_x());
    CHECK((y.matrix() - oracle::commutator(oracle::sz(), oracle::sx())).norm() < 1e-15);
    CHECK(approx_equal(y, Complex(0, 2) * pauli_y()));
    CHECK(inner_derivation(pauli_z()).apply(pauli_z()).is_zero());

    const auto d_unit = inner_derivation(AlgebraElement::unit(m2));
    Rng rng(1);
    CHECK(d_unit.apply(random_element(m2, rng)).is_zero());
}

TEST_CASE("coordinate fields differentiate") {
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    const auto d = Derivation::coordinate_field(p1, 0);
    CHECK(approx_equal(d.apply(q * q * p), 2.0 * q * p));
    CHECK(lie_bracket(d, Derivation::coordinate_field(p1, 1)).apply(q * p).is_zero());
}

TEST_CASE("derivations kill the unit") {
    Rng rng(2);
    for (const auto& alg : {m2, AlgebraDescriptor::matrix(3), p1, AlgebraDescriptor::tensor(p1, m2)}) {
        const auto basis = DerivationBasis::natural(alg);
        for (int k = 0; k < 5; ++k) CHECK(random_derivation(basis, rng).apply(AlgebraElement::unit(alg)).is_zero());
    }
}

TEST_CASE("bracket of inner derivations is inner by the commutator") {
    const auto lhs = lie_bracket(inner_derivation(pauli_x()), inner_derivation(pauli_y()));
    const auto rhs = inner_derivation(Complex(0, 2) * pauli_z());
    CHECK(action_distance(lhs, rhs) < 1e-12);
    Rng rng(3);
    const auto basis = DerivationBasis::natural(AlgebraDescriptor::matrix(3));
    const auto x = random_derivation(basis, rng);
    CHECK(action_distance(lie_bracket(x, x), Derivation::zero(x.algebra())) < 1e-12);
}

TEST_CASE("lie bracket is antisymmetric and satisfies Jacobi") {
    Rng rng(4);
    for (const auto& alg : {AlgebraDescriptor::matrix(3), AlgebraDescriptor::polynomial(1)}) {
        const auto basis = DerivationBasis::natural(alg);
        for (int k = 0; k < 5; ++k) {
            const auto x = random_derivation(basis, rng);
            const auto y = random_derivation(basis, rng);
            const auto z = random_derivation(basis, rng);
            CHECK(action_distance(lie_bracket(x, y), scale(-1.0, lie_bracket(y, x))) < 1e-9);
            const auto jac = add(add(lie_bracket(x, lie_bracket(y, z)), lie_bracket(y, lie_bracket(z, x))),
                                 lie_bracket(z, lie_bracket(x, y)));
            CHECK(action_distance(jac, Derivation::zero(alg)) < 1e-9);
        }
        CHECK(basis.jacobi_residual() < 1e-12);
    }
}

TEST_CASE("derivation involution") {
    CHECK(action_distance(derivation_star(inner_derivation(pauli_z())), inner_derivation(-1.0 * pauli_z())) < 1e-12);
    const auto dq = Derivation::coordinate_field(p1, 0);
    CHECK(action_distance(derivation_star(dq), dq) < 1e-12);
    Rng rng(5);
    for (const auto& alg : {m2, p1, AlgebraDescriptor::tensor(p1, m2)}) {
        const auto x = random_derivation(DerivationBasis::natural(alg), rng);
        CHECK(action_distance(derivation_star(derivation_star(x)), x) < 1e-10);
        // X*(A) = (X(A*))*
        const auto a = random_element(alg, rng);
        CHECK(approx_equal(derivation_star(x).apply(a), star(x.apply(star(a))), 1e-10));
    }
}

TEST_CASE("Leibniz check") {
    CHECK(check_derivation(inner_derivation(pauli_z())).is_derivation);
    const auto left_mult = check_derivation(m2, [](const AlgebraElement& a) { return pauli_z() * a; });
    CHECK_FALSE(left_mult.is_derivation);
    REQUIRE(left_mult.witness.has_value());
    // oracle: direct evaluation on (σx, σy)
    const Matrix lhs = oracle::sz() * oracle::sx() * oracle::sy();
    const Matrix rhs = oracle::sz() * oracle::sx() * oracle::sy() + oracle::sx() * oracle::sz() * oracle::sy();
    CHECK((lhs - rhs).norm() > 1.0);
    CHECK(check_derivation(m2, [](const AlgebraElement& a) { return AlgebraElement::zero(a.algebra()); }).is_derivation);
}

TEST_CASE("push-forward along conjugation") {
    const Matrix u = oracle::unitary(oracle::sx() + 0.4 * oracle::sz(), 0.7);
    const auto phi = AlgebraMorphism::unitary_conjugation(m2, u);
    const auto a = pauli_y() + 0.3 * pauli_z();
    const auto pushed = push_forward(phi, inner_derivation(a));
    const auto expected = inner_derivation(AlgebraElement(m2, u * a.matrix() * u.adjoint()));
    CHECK(action_distance(pushed, expected) < 1e-12);

    const auto x = inner_derivation(pauli_x());
    CHECK(action_distance(push_forward(AlgebraMorphism::identity(m2), x), x) == 0.0);

    const auto y = inner_derivation(pauli_z());
    CHECK(action_distance(push_forward(phi, lie_bracket(x, y)), lie_bracket(push_forward(phi, x), push_forward(phi, y))) <
          1e-12);
}

TEST_CASE("push-forward along affine substitution preserves brackets") {
    Eigen::MatrixXd lin(2, 2);
    lin << 1.0, 0.5, -0.3, 2.0;
    Eigen::VectorXd off(2);
    off << 0.2, -1.0;
    const auto phi = AlgebraMorphism::affine_substitution(p1, lin, off);
    Rng rng(6);
    const auto basis = DerivationBasis::natural(p1);
    const auto x = random_derivation(basis, rng);
    const auto y = random_derivation(basis, rng);
    CHECK(action_distance(push_forward(phi, lie_bracket(x, y)), lie_bracket(push_forward(phi, x), push_forward(phi, y))) <
          1e-9);
}

TEST_CASE("basis expansion round-trips") {
    Rng rng(7);
    for (const auto& alg : {m2, AlgebraDescriptor::matrix(3), p1, AlgebraDescriptor::tensor(p1, m2),
                            AlgebraDescriptor::tensor(m2, m2)}) {
        const auto basis = DerivationBasis::natural(alg);
        const auto x = random_derivation(basis, rng);
        CHECK(action_distance(basis.from_coefficients(basis.expand(x)), x) < 1e-10);
    }
    CHECK(DerivationBasis::natural(AlgebraDescriptor::matrix(3)).size() == 8);
    CHECK(DerivationBasis::natural(AlgebraDescriptor::polynomial(2)).size() == 4);
}

TEST_CASE("matrix algebras have only inner derivations in the natural basis") {
    CHECK(DerivationBasis::natural(m2).is_inner());
    CHECK_FALSE(DerivationBasis::natural(p1).is_inner());
}
