#include <doctest.h>

#include "oracles.hpp"
#include "supmech/errors.hpp"
#include "supmech/morphism.hpp"
#include "supmech/states.hpp"
#include "supmech/symplectic.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto p1 = AlgebraDescriptor::polynomial(1);

Matrix diag(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Eigen::VectorXcd plus() {
    Eigen::VectorXcd v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return v;
}

}  // namespace

TEST_CASE("expectations") {
    CHECK(std::abs(expectation(StateFunctional::density_matrix(m2, diag(1, 0)), pauli_z()) - 1.0) < 1e-15);
    const auto q = coordinate(p1, 0);
    CHECK(std::abs(expectation(StateFunctional::phase_point(p1, {2.0, 0.0}), q * q) - 4.0) < 1e-15);
    Rng rng(1);
    for (const auto& alg : {m2, p1, AlgebraDescriptor::tensor(m2, m2)}) {
        const auto phi = random_state(alg, rng);
        CHECK(std::abs(expectation(phi, AlgebraElement::unit(alg)) - 1.0) < 1e-12);
    }
}

TEST_CASE("state validation") {
    CHECK(is_state(StateFunctional::density_matrix(m2, diag(0.5, 0.5))).is_state);
    const auto bad = is_state(StateFunctional::density_matrix(m2, diag(1.5, -0.5)));
    CHECK_FALSE(bad.is_state);
    CHECK(bad.min_eigenvalue < -0.4);
    CHECK_FALSE(is_state(StateFunctional::density_matrix(m2, diag(0.5, 0.6))).is_state);

    Rng rng(2);
    const auto a = random_state(m2, rng);
    const auto b = random_state(m2, rng);
    const auto m = mix({{0.3, a}, {0.7, b}});
    CHECK(is_state(m).is_state);
    const auto x = random_element(m2, rng);
    CHECK(std::abs(expectation(m, x) - (0.3 * expectation(a, x) + 0.7 * expectation(b, x))) < 1e-12);
}

TEST_CASE("transport along conjugation") {
    const Matrix u = oracle::unitary(oracle::sx() + 0.2 * oracle::sy(), 0.9);
    const auto phi = AlgebraMorphism::unitary_conjugation(m2, u);
    Rng rng(3);
    const auto rho = random_state(m2, rng);
    const auto moved = transport_state(phi, rho);
    CHECK((moved.density() - u.adjoint() * rho.density() * u).norm() < 1e-12);
    // trace cyclicity: Tr(U*ρU A) = Tr(ρ U A U*)
    const auto a = random_element(m2, rng);
    CHECK(std::abs(expectation(moved, a) - expectation(rho, phi(a))) < 1e-12);
    CHECK(state_distance(transport_state(AlgebraMorphism::identity(m2), rho), rho) == 0.0);
}

TEST_CASE("infinitesimal change of a state") {
    const auto s = quantum_form(m2, 1.0);
    const auto g = pauli_z() + 0.3 * pauli_x();
    Rng rng(4);
    const auto rho = random_state(m2, rng);
    const auto a = random_hermitian(m2, rng);
    const double eps = 1e-4;
    // Φ_ε = conjugation by e^{iεG}, the canonical flow of G for ħ = 1
    const auto phi = AlgebraMorphism::unitary_conjugation(m2, oracle::unitary(g.matrix(), eps));
    const Complex delta = expectation(transport_state(phi, rho), a) - expectation(rho, a);
    const Complex predicted = eps * expectation(rho, s.poisson_bracket(g, a));
    CHECK(std::abs(delta - predicted) < 10 * eps * eps);
}

TEST_CASE("separation of observables and states") {
    CHECK(separating_state(pauli_x(), pauli_y()).second > 0.9);
    const auto pp = StateFunctional::pure(m2, plus());
    CHECK(std::abs(expectation(pp, pauli_x()) - 1.0) < 1e-15);
    CHECK(std::abs(expectation(pp, pauli_y())) < 1e-15);

    const auto q = coordinate(p1, 0);
    const auto point = StateFunctional::phase_point(p1, {2.0, 0.0});
    CHECK(std::abs(expectation(point, q) - 2.0) < 1e-15);
    CHECK(std::abs(expectation(point, q * q) - 4.0) < 1e-15);
    CHECK(separating_state(q, q * q).second > 0.0);

    CHECK(separating_observable(pp, StateFunctional::pure(m2, Eigen::Vector2cd(1, 0))).second > 0.1);
}

TEST_CASE("CC condition") {
    Rng rng(5);
    for (const auto& alg : {m2, AlgebraDescriptor::matrix(3), p1}) {
        std::vector<AlgebraElement> observables;
        std::vector<StateFunctional> states;
        for (int k = 0; k < 20; ++k) {
            observables.push_back(random_hermitian(alg, rng));
            states.push_back(random_pure_state(alg, rng));
        }
        observables.push_back(observables.back());
        const auto r = cc_check(alg, observables, states);
        CHECK(r.passed());
        CHECK(r.observable_pairs_skipped == 1);
        CHECK(r.observable_pairs + r.observable_pairs_skipped == observables.size() - 1);
    }
}

TEST_CASE("product states") {
    const auto a = StateFunctional::pure(m2, plus());
    const auto b = StateFunctional::density_matrix(m2, diag(0.25, 0.75));
    const auto ab = StateFunctional::product(a, b);
    CHECK(is_state(ab).is_state);
    CHECK((ab.as_density().density() - oracle::kron(a.density(), b.density())).norm() < 1e-15);
    CHECK(std::abs(expectation(ab, tensor_element(pauli_x(), pauli_z())) - (-0.5)) < 1e-15);
}
