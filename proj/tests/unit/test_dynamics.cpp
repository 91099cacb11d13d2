#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "supmech/dynamics.hpp"
#include "supmech/errors.hpp"
#include "supmech/states.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto p1 = AlgebraDescriptor::polynomial(1);

std::shared_ptr<const SymplecticStructure> quantum(const AlgebraDescriptor& alg, double hbar = 1.0) {
    return std::make_shared<const SymplecticStructure>(quantum_form(alg, hbar));
}

std::shared_ptr<const SymplecticStructure> classical(const AlgebraDescriptor& alg) {
    return std::make_shared<const SymplecticStructure>(classical_form(alg));
}

EvolutionConfig grid(double t_end, double dt = 1e-3, int record_every = 100) {
    EvolutionConfig cfg;
    cfg.t_end = t_end;
    cfg.dt = dt;
    cfg.record_every = record_every;
    return cfg;
}

}  // namespace

TEST_CASE("spin precession") {
    HamiltonianSystem sys(quantum(m2), 0.5 * pauli_z());
    const auto s = evolve_observable(sys, pauli_x(), grid(10.0));
    REQUIRE(s.times.back() == 10.0);
    double err = 0.0;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double t = s.times[k];
        err = std::max(err, (s.values[k].matrix() - (std::cos(t) * oracle::sx() - std::sin(t) * oracle::sy())).norm());
    }
    CHECK(err < 1e-6);
}

TEST_CASE("central Hamiltonian leaves observables fixed") {
    HamiltonianSystem sys(quantum(m2), 2.5 * AlgebraElement::unit(m2));
    Rng rng(1);
    const auto a = random_element(m2, rng);
    const auto s = evolve_observable(sys, a, grid(1.0));
    for (const auto& v : s.values) CHECK(approx_equal(v, a, 1e-12));
}

TEST_CASE("harmonic oscillator") {
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    HamiltonianSystem osc(classical(p1), 0.5 * (q * q + p * p));
    const auto s = evolve_observable(osc, q, grid(10.0));
    double err = 0.0;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const Complex v = s.values[k].polynomial().evaluate(std::vector<double>{1.0, 0.0});
        err = std::max(err, std::abs(v - std::cos(s.times[k])));
    }
    CHECK(err < 1e-6);

    const auto pts = evolve_point(osc, {1.0, 0.0}, grid(10.0));
    for (std::size_t k = 0; k < pts.times.size(); ++k) {
        CHECK(std::abs(pts.values[k][0] - std::cos(pts.times[k])) < 1e-6);
        CHECK(std::abs(pts.values[k][1] + std::sin(pts.times[k])) < 1e-6);
    }
}

TEST_CASE("anharmonic Hamiltonians need point evolution") {
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    HamiltonianSystem sys(classical(p1), 0.5 * (q * q + p * p) + 0.1 * q * q * q * q);
    CHECK_THROWS_AS(evolve_observable(sys, q, grid(1.0)), DegreeBoundExceeded);
    const auto s = evolve_state(sys, StateFunctional::phase_point(p1, {1.0, 0.0}), grid(5.0));
    const auto h = sys.hamiltonian();
    for (const auto& phi : s.values) CHECK(std::abs(expectation(phi, h) - 0.6) < 1e-9);
}

TEST_CASE("von Neumann evolution") {
    HamiltonianSystem sys(quantum(m2), 0.5 * pauli_z());
    Eigen::VectorXcd plus(2);
    plus << 1.0, 1.0;
    const auto s = evolve_state(sys, StateFunctional::pure(m2, plus), grid(10.0));
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        CHECK(std::abs(expectation(s.values[k], pauli_x()) - std::cos(s.times[k])) < 1e-6);
    }

    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.8;
    rho(1, 1) = 0.2;
    const auto stationary = evolve_state(sys, StateFunctional::density_matrix(m2, rho), grid(3.0));
    for (const auto& phi : stationary.values) CHECK((phi.density() - rho).norm() < 1e-12);
}

TEST_CASE("Heisenberg and Schrödinger pictures agree") {
    const auto m3 = AlgebraDescriptor::matrix(3);
    Rng rng(2);
    HamiltonianSystem sys(quantum(m3, 0.7), random_hermitian(m3, rng));
    const auto a = random_hermitian(m3, rng);
    const auto rho = random_state(m3, rng);
    const auto cfg = grid(3.0, 1e-3, 50);
    const auto obs = evolve_observable(sys, a, cfg);
    const auto st = evolve_state(sys, rho, cfg);
    REQUIRE(obs.times.size() == st.times.size());
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
        CHECK(std::abs(expectation(st.values[k], a) - expectation(rho, obs.values[k])) < 1e-8);
        const Matrix exact = oracle::heisenberg(sys.hamiltonian().matrix(), a.matrix(), obs.times[k], 0.7);
        CHECK((obs.values[k].matrix() - exact).norm() < 1e-6);
    }
}

TEST_CASE("exact conjugation matches RK4") {
    Rng rng(3);
    HamiltonianSystem sys(quantum(m2), random_hermitian(m2, rng));
    const auto a = random_element(m2, rng);
    auto cfg = grid(2.0, 1e-3, 100);
    const auto rk = evolve_observable(sys, a, cfg);
    cfg.method = EvolutionMethod::ExactConjugation;
    const auto ex = evolve_observable(sys, a, cfg);
    for (std::size_t k = 0; k < rk.times.size(); ++k) CHECK((rk.values[k] - ex.values[k]).norm() < 1e-9);
}

TEST_CASE("RK4 converges at fourth order") {
    Rng rng(4);
    auto h = random_hermitian(m2, rng);
    HamiltonianSystem sys(quantum(m2), (4.0 / h.norm()) * h);
    const auto a = random_element(m2, rng);
    auto cfg = grid(2.0, 1e-2, 1000000);
    cfg.method = EvolutionMethod::ExactConjugation;
    const auto exact = evolve_observable(sys, a, cfg).values.back();
    cfg.method = EvolutionMethod::RK4;
    std::vector<double> errors;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
        cfg.dt = dt;
        errors.push_back((evolve_observable(sys, a, cfg).values.back() - exact).norm());
    }
    for (int k = 0; k + 1 < 3; ++k) CHECK(std::log2(errors[k] / errors[k + 1]) == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("oversized steps are refused") {
    HamiltonianSystem sys(quantum(m2), 50.0 * pauli_z());
    auto cfg = grid(1.0, 0.1, 1);
    cfg.check_interval = 1;
    CHECK_THROWS_AS(evolve_observable(sys, pauli_x(), cfg), StepTooLarge);
}

TEST_CASE("coupled spins match the flattened oracle") {
    const auto q = quantum(m2);
    HamiltonianSystem first(q, 0.5 * pauli_z());
    HamiltonianSystem second(q, 0.3 * pauli_x());
    const auto sys = coupled_system(first, second, {{pauli_z(), 0.1 * pauli_z()}});
    const Matrix h = 0.5 * oracle::kron(oracle::sz(), oracle::id(2)) + 0.3 * oracle::kron(oracle::id(2), oracle::sx()) +
                     0.1 * oracle::kron(oracle::sz(), oracle::sz());
    CHECK((flatten(sys.hamiltonian()) - h).norm() < 1e-15);
    const auto a0 = tensor_element(pauli_x(), pauli_y());
    const auto s = evolve_observable(sys, a0, grid(10.0));
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        CHECK((flatten(s.values[k]) - oracle::heisenberg(h, flatten(a0), s.times[k])).norm() < 1e-6);
    }
}

TEST_CASE("uncoupled factors evolve independently") {
    const auto q = quantum(m2);
    HamiltonianSystem first(q, 0.5 * pauli_z());
    HamiltonianSystem second(q, 0.3 * pauli_x() + 0.2 * pauli_y());
    const auto sys = coupled_system(first, second, {});
    const auto cfg = grid(4.0);
    const auto s = evolve_observable(sys, tensor_element(pauli_x(), pauli_z()), cfg);
    const auto sa = evolve_observable(first, pauli_x(), cfg);
    const auto sb = evolve_observable(second, pauli_z(), cfg);
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        CHECK((s.values[k] - tensor_element(sa.values[k], sb.values[k])).norm() < 1e-8);
    }
}

TEST_CASE("quantum-classical coupling is forbidden") {
    const auto q = coordinate(p1, 0);
    HamiltonianSystem classical_sys(classical(p1), q * q);
    HamiltonianSystem quantum_sys(quantum(m2), pauli_z());
    CHECK_THROWS_AS(coupled_system(classical_sys, quantum_sys, {}), ForbiddenCoupling);
    CHECK_THROWS_AS(coupled_system(quantum_sys, HamiltonianSystem(quantum(m2, 2.0), pauli_x()), {}), ForbiddenCoupling);
}
