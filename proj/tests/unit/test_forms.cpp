#include <doctest.h>

#include "oracles.hpp"
#include "supmech/forms.hpp"
#include "supmech/morphism.hpp"
#include "supmech/symplectic.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto p1 = AlgebraDescriptor::polynomial(1);

DifferentialForm coordinate_one_form(const AlgebraDescriptor& alg, int index) {
    const auto basis = DerivationBasis::coordinate(alg);
    DifferentialForm f(basis, 1);
    f.set({index}, AlgebraElement::unit(alg));
    return f;
}

}  // namespace

TEST_CASE("canonical form on Pauli derivations") {
    const auto wc = canonical_form(m2);
    const auto v = evaluate(wc, {inner_derivation(pauli_x()), inner_derivation(pauli_y())});
    CHECK((v.matrix() - oracle::commutator(oracle::sx(), oracle::sy())).norm() < 1e-12);
    CHECK(approx_equal(v, Complex(0, 2) * pauli_z()));
    const auto x = inner_derivation(pauli_x() + 0.5 * pauli_z());
    CHECK(evaluate(wc, {x, x}).is_zero());
}

TEST_CASE("classical form on coordinate fields") {
    const auto wcl = classical_form(p1).form();
    const auto dq = Derivation::coordinate_field(p1, 0);
    const auto dp = Derivation::coordinate_field(p1, 1);
    CHECK(approx_equal(evaluate(wcl, {dp, dq}), AlgebraElement::unit(p1)));
    const auto p2 = AlgebraDescriptor::polynomial(2);
    const auto w2 = classical_form(p2).form();
    CHECK(evaluate(w2, {Derivation::coordinate_field(p2, 0), Derivation::coordinate_field(p2, 1)}).is_exactly_zero());
    CHECK(exterior_derivative(w2).max_norm() == 0.0);
}

TEST_CASE("wedge of coordinate differentials") {
    const auto w = wedge(coordinate_one_form(p1, 0), coordinate_one_form(p1, 1));
    CHECK(approx_equal(evaluate(w, {Derivation::coordinate_field(p1, 0), Derivation::coordinate_field(p1, 1)}),
                       AlgebraElement::unit(p1)));
    Rng rng(1);
    const auto basis = DerivationBasis::natural(p1);
    const auto a = random_form(basis, 1, rng, 2);
    CHECK(wedge(a, a).max_norm() < 1e-12);

    const auto f = random_element(m2, rng);
    const auto b = random_form(DerivationBasis::natural(m2), 2, rng);
    const auto fb = wedge(DifferentialForm::function(b.basis(), f), b);
    for (const auto& t : fb.index_tuples()) CHECK(approx_equal(fb.at(t), f * b.at(t), 1e-12));
}

TEST_CASE("exterior derivative of a 0-form") {
    const auto basis = DerivationBasis::natural(m2);
    const auto dz = exterior_derivative(DifferentialForm::function(basis, pauli_z()));
    const auto v = evaluate(dz, {inner_derivation(pauli_x())});
    CHECK((v.matrix() - oracle::commutator(oracle::sx(), oracle::sz())).norm() < 1e-12);
    CHECK(approx_equal(v, Complex(0, -2) * pauli_y()));
}

TEST_CASE("d squared vanishes and the canonical form is closed") {
    Rng rng(2);
    for (const auto& alg : {m2, AlgebraDescriptor::matrix(3), p1}) {
        const auto basis = DerivationBasis::natural(alg);
        for (int p = 0; p < 2; ++p) {
            const auto a = random_form(basis, p, rng);
            CHECK(exterior_derivative(exterior_derivative(a)).max_norm() < 1e-10);
        }
    }
    CHECK(exterior_derivative(canonical_form(m2)).max_norm() < 1e-12);
    CHECK(exterior_derivative(canonical_form(AlgebraDescriptor::matrix(3))).max_norm() < 1e-12);
}

TEST_CASE("Lie derivatives") {
    const auto wc = canonical_form(m2);
    const auto basis = wc.basis();
    for (std::size_t k = 0; k < basis.size(); ++k) CHECK(lie_derivative(basis[k], wc).max_norm() < 1e-12);

    Rng rng(3);
    const auto y = random_derivation(basis, rng);
    const auto a = random_element(m2, rng);
    const auto la = lie_derivative(y, DifferentialForm::function(basis, a));
    CHECK(approx_equal(la.at({}), y.apply(a), 1e-12));
    const auto f = random_form(basis, 2, rng);
    CHECK(lie_derivative(Derivation::zero(m2), f).max_norm() == 0.0);
}

TEST_CASE("interior products") {
    const auto wc = canonical_form(m2);
    const auto basis = wc.basis();
    const auto i_wc = interior_product(inner_derivation(pauli_z()), wc);
    const auto d_sz = exterior_derivative(DifferentialForm::function(basis, pauli_z()));
    CHECK(form_distance(i_wc, -1.0 * d_sz) < 1e-12);

    Rng rng(4);
    const auto x = random_derivation(basis, rng);
    CHECK(interior_product(x, interior_product(x, random_form(basis, 2, rng))).max_norm() < 1e-12);

    // i_{∂p}(dp∧dq) = dq: the classical form takes the value 1 on (∂p, ∂q).
    const auto i_cl = interior_product(Derivation::coordinate_field(p1, 1), classical_form(p1).form());
    CHECK(form_distance(i_cl, coordinate_one_form(p1, 0)) < 1e-14);
}

TEST_CASE("form involution") {
    const auto wc = canonical_form(m2);
    CHECK(form_distance(form_star(wc), -1.0 * wc) < 1e-12);
    const auto wq = quantum_form(m2, 1.0).form();
    CHECK(form_distance(form_star(wq), wq) < 1e-12);
    Rng rng(5);
    const auto a = random_form(DerivationBasis::natural(AlgebraDescriptor::matrix(3)), 2, rng);
    CHECK(form_distance(form_star(form_star(a)), a) < 1e-12);
}

TEST_CASE("pull-backs") {
    Rng rng(6);
    const auto basis = DerivationBasis::natural(m2);
    const auto a = random_form(basis, 1, rng);
    const auto b = random_form(basis, 1, rng);
    CHECK(form_distance(pull_back(AlgebraMorphism::identity(m2), a), a) < 1e-14);

    const Matrix u = oracle::unitary(oracle::sz(), 0.3);
    const auto phi = AlgebraMorphism::unitary_conjugation(m2, u);
    CHECK(form_distance(pull_back(phi, wedge(a, b)), wedge(pull_back(phi, a), pull_back(phi, b))) < 1e-12);

    const auto wc = canonical_form(m2);
    CHECK(form_distance(pull_back(phi, wc), wc) < 1e-12);
}

TEST_CASE("Cartan identities on a small sample") {
    Rng rng(7);
    for (const auto& alg : {m2, p1}) {
        const auto basis = DerivationBasis::natural(alg);
        for (int k = 0; k < 5; ++k) {
            const auto x = random_derivation(basis, rng, 2);
            const auto a = random_form(basis, 1, rng, 3);
            const auto lhs = interior_product(x, exterior_derivative(a)) + exterior_derivative(interior_product(x, a));
            CHECK(form_distance(lhs, lie_derivative(x, a)) < 1e-9);
        }
    }
}
