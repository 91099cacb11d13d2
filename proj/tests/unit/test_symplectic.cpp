#include <doctest.h>

#include "oracles.hpp"
#include "supmech/errors.hpp"
#include "supmech/morphism.hpp"
#include "supmech/symplectic.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto p1 = AlgebraDescriptor::polynomial(1);

}  // namespace

TEST_CASE("quantum form entries") {
    const auto wq = quantum_form(m2, 1.0).form();
    const auto v = evaluate(wq, {inner_derivation(pauli_x()), inner_derivation(pauli_y())});
    CHECK((v.matrix() - 2.0 * oracle::sz()).norm() < 1e-12);
    const auto w2 = quantum_form(m2, 2.0).form();
    CHECK(form_distance(w2, 2.0 * wq) < 1e-14);
}

TEST_CASE("verify_symplectic") {
    const auto rq = verify_symplectic(quantum_form(m2, 1.0));
    CHECK(rq.closed_residual < 1e-12);
    CHECK(rq.rank == 3);
    CHECK(rq.nondegenerate);

    const auto rc = verify_symplectic(classical_form(p1));
    CHECK(rc.closed_residual == 0.0);
    CHECK(rc.rank == 2);
    CHECK(rc.nondegenerate);

    const SymplecticStructure zero(DifferentialForm(DerivationBasis::natural(m2), 2), "zero");
    CHECK_FALSE(verify_symplectic(zero).nondegenerate);

    const auto m3 = AlgebraDescriptor::matrix(3);
    CHECK(verify_symplectic(quantum_form(m3, 0.5)).rank == 8);
}

TEST_CASE("Hamiltonian derivations") {
    const auto wc = scaled_canonical_form(m2, 1.0);
    CHECK(action_distance(wc.hamiltonian_derivation(pauli_z()), inner_derivation(pauli_z())) < 1e-12);

    const auto wq = quantum_form(m2, 1.0);
    CHECK(action_distance(wq.hamiltonian_derivation(pauli_z()), inner_derivation(Complex(0, 1) * pauli_z())) < 1e-12);

    const auto cl = classical_form(p1);
    const auto y = cl.hamiltonian_derivation(coordinate(p1, 0));
    CHECK(action_distance(y, scale(-1.0, Derivation::coordinate_field(p1, 1))) < 1e-12);

    // i_{Y_A} ω = −dA for random A
    Rng rng(1);
    for (const auto& s : {wq, quantum_form(AlgebraDescriptor::matrix(3), 2.0), cl}) {
        const auto a = random_element(s.algebra(), rng);
        const auto lhs = interior_product(s.hamiltonian_derivation(a), s.form());
        const auto rhs = -1.0 * exterior_derivative(DifferentialForm::function(s.basis(), a));
        CHECK(form_distance(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("Poisson brackets") {
    const auto wq = quantum_form(m2, 1.0);
    CHECK((wq.poisson_bracket(pauli_x(), pauli_y()).matrix() + 2.0 * oracle::sz()).norm() < 1e-12);

    const auto cl = classical_form(p1);
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    CHECK(approx_equal(cl.poisson_bracket(p, q), AlgebraElement::unit(p1)));
    Rng rng(2);
    const auto a = random_element(p1, rng);
    CHECK(cl.poisson_bracket(a, a).is_zero());

    // {A, B}_Q = (−iħ)⁻¹[A, B]
    for (double hbar : {0.5, 1.0, 2.0}) {
        const auto s = quantum_form(AlgebraDescriptor::matrix(3), hbar);
        const auto x = random_element(s.algebra(), rng);
        const auto y = random_element(s.algebra(), rng);
        const Matrix expected = (x.matrix() * y.matrix() - y.matrix() * x.matrix()) / Complex(0, -hbar);
        CHECK((s.poisson_bracket(x, y).matrix() - expected).norm() < 1e-10);
    }
}

TEST_CASE("classical bracket in coordinates") {
    // {f, g} = ∂f/∂p ∂g/∂q − ∂f/∂q ∂g/∂p, so that {p, q} = 1.
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    const auto f = q * q * p + 3.0 * p;
    const auto g = q * p * p;
    const auto expected = (q * q + 3.0 * AlgebraElement::unit(p1)) * (p * p) - (2.0 * q * p) * (2.0 * q * p);
    CHECK(approx_equal(classical_form(p1).poisson_bracket(f, g), expected, 1e-12));
}

TEST_CASE("canonical transformations") {
    const auto wq = quantum_form(m2, 1.0);
    const auto u = oracle::unitary(-1.0 * oracle::sz(), 0.7);
    CHECK(is_canonical_transformation(AlgebraMorphism::unitary_conjugation(m2, u), wq));

    const auto cl = classical_form(p1);
    Eigen::MatrixXd rot(2, 2);
    rot << 0, 1, -1, 0;
    CHECK(is_canonical_transformation(AlgebraMorphism::affine_substitution(p1, rot, Eigen::VectorXd::Zero(2)), cl));
    Eigen::MatrixXd stretch(2, 2);
    stretch << 2, 0, 0, 1;
    const auto phi = AlgebraMorphism::affine_substitution(p1, stretch, Eigen::VectorXd::Zero(2));
    CHECK_FALSE(is_canonical_transformation(phi, cl));
    // q -> 2q pulls the form back to half of itself.
    CHECK(canonical_transformation_defect(phi, cl) == doctest::Approx(0.5));
}

TEST_CASE("infinitesimal canonical change") {
    const auto wq = quantum_form(m2, 1.0);
    const double eps = 0.01;
    const auto delta = infinitesimal_canonical_change(wq, pauli_z(), pauli_x(), eps);
    CHECK(approx_equal(delta, -2.0 * eps * pauli_y(), 1e-14));
    // finite difference of e^{iεσz} σx e^{−iεσz}
    const Matrix moved = oracle::heisenberg(oracle::sz(), oracle::sx(), eps);
    CHECK((moved - oracle::sx() - delta.matrix()).norm() < 4 * eps * eps);
    CHECK(infinitesimal_canonical_change(wq, pauli_z(), pauli_x(), 0.0).is_exactly_zero());

    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    const auto h = 0.5 * (q * q + p * p);
    CHECK(approx_equal(infinitesimal_canonical_change(classical_form(p1), h, q, eps), eps * p, 1e-14));
}

TEST_CASE("spin-3/2 restricted pair") {
    const auto m4 = AlgebraDescriptor::matrix(4);
    const auto spins = spin_matrices(1.5);
    // su(2) relations [S1, S2] = i S3
    CHECK((spins[0] * spins[1] - spins[1] * spins[0] - oracle::I * spins[2]).norm() < 1e-12);
    std::vector<AlgebraElement> gens;
    for (const auto& s : spins) gens.emplace_back(m4, s);
    const Complex b(0.3, -1.2);
    const auto pair = generalized_pair(m4, gens, b);
    const auto y = pair.hamiltonian_derivation(gens[2]);
    CHECK(action_distance(y, inner_derivation((1.0 / b) * gens[2])) < 1e-10);

    Rng rng(3);
    CHECK_THROWS_AS(pair.hamiltonian_derivation(random_hermitian(m4, rng)), NonDegeneracyFailure);
    CHECK_THROWS_AS(generalized_pair(m4, {gens[0], gens[1]}, b), NotLieSubalgebra);
}

TEST_CASE("Poisson bracket identities") {
    Rng rng(4);
    for (const auto& s : {quantum_form(m2, 0.5), quantum_form(AlgebraDescriptor::matrix(3), 2.0), classical_form(p1)}) {
        for (int k = 0; k < 5; ++k) {
            const auto a = random_element(s.algebra(), rng);
            const auto b = random_element(s.algebra(), rng);
            const auto c = random_element(s.algebra(), rng);
            CHECK(approx_equal(s.poisson_bracket(a, b * c),
                               s.poisson_bracket(a, b) * c + b * s.poisson_bracket(a, c), 1e-9));
            const auto jac = s.poisson_bracket(a, s.poisson_bracket(b, c)) + s.poisson_bracket(b, s.poisson_bracket(c, a)) +
                             s.poisson_bracket(c, s.poisson_bracket(a, b));
            CHECK(jac.norm() < 1e-9);
            CHECK(action_distance(lie_bracket(s.hamiltonian_derivation(a), s.hamiltonian_derivation(b)),
                                  s.hamiltonian_derivation(s.poisson_bracket(a, b))) < 1e-9);
        }
    }
}
