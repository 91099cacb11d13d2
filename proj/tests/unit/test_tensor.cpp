#include <doctest.h>

#include "oracles.hpp"
#include "supmech/errors.hpp"
#include "supmech/tensor_universality.hpp"

using namespace supmech;

namespace {

const auto m2 = AlgebraDescriptor::matrix(2);
const auto m3 = AlgebraDescriptor::matrix(3);
const auto p1 = AlgebraDescriptor::polynomial(1);
const auto p2 = AlgebraDescriptor::polynomial(2);

}  // namespace

TEST_CASE("product form blocks") {
    const auto q = quantum_form(m2, 1.0);
    const auto w = product_form(q, q);
    const auto lx = Derivation::lift_left(inner_derivation(pauli_x()), m2);
    const auto ly = Derivation::lift_left(inner_derivation(pauli_y()), m2);
    const auto ry = Derivation::lift_right(m2, inner_derivation(pauli_y()));
    CHECK(evaluate(w, {lx, ry}).is_zero());
    const auto v = evaluate(w, {lx, ly});
    CHECK((flatten(v) - 2.0 * oracle::kron(oracle::sz(), oracle::id(2))).norm() < 1e-12);
    CHECK(exterior_derivative(w).max_norm() < 1e-12);
}

TEST_CASE("world classification") {
    const auto both_classical = classify_worlds(classical_form(p1), classical_form(p2));
    CHECK(both_classical.verdict == WorldVerdict::BothCommutative);
    CHECK(std::abs(both_classical.lambda) == 0.0);

    const auto both_quantum = classify_worlds(quantum_form(m2, 1.0), quantum_form(m3, 1.0));
    CHECK(both_quantum.verdict == WorldVerdict::BothQuantum);
    CHECK(std::abs(both_quantum.lambda - Complex(0, 1)) < 1e-10);

    const auto scaled = classify_worlds(quantum_form(m2, 0.5), quantum_form(m2, 0.5));
    CHECK(std::abs(scaled.lambda - Complex(0, 0.5)) < 1e-10);

    const auto mismatched = classify_worlds(quantum_form(m2, 1.0), quantum_form(m2, 2.0));
    CHECK(mismatched.verdict == WorldVerdict::Inconsistent);
    CHECK(mismatched.reason == "lambda-inconsistent");

    const auto mixed = classify_worlds(classical_form(p1), quantum_form(m2, 1.0));
    CHECK(mixed.verdict == WorldVerdict::Inconsistent);
    CHECK(mixed.reason == "mixed-case");

    // A real multiple of the canonical form is not a real form, so a real lambda is allowed.
    const auto real_b = classify_worlds(scaled_canonical_form(m2, 1.0), scaled_canonical_form(m3, 1.0));
    CHECK(real_b.verdict == WorldVerdict::BothQuantum);
    CHECK(std::abs(real_b.lambda - Complex(-1, 0)) < 1e-10);
}

TEST_CASE("lambda extraction") {
    const auto e = extract_lambda(quantum_form(m3, 2.0), 3);
    REQUIRE(e.lambda.has_value());
    CHECK(std::abs(*e.lambda - Complex(0, 2)) < 1e-8);
    CHECK(e.pairs_used >= 50);
    const auto c = extract_lambda(classical_form(p1), 3);
    REQUIRE(c.lambda.has_value());
    CHECK(std::abs(*c.lambda) < 1e-12);
}

TEST_CASE("product Hamiltonian derivation") {
    const auto q = quantum_form(m2, 1.0);
    const auto r = solve_product_hamiltonian(q, q, pauli_x(), pauli_y());
    REQUIRE(r.success);
    CHECK(std::abs(*r.lambda - Complex(0, 1)) < 1e-10);
    // on M2 ⊗ M2 it must act as the quantum bracket of the product algebra
    const auto t = AlgebraDescriptor::tensor(m2, m2);
    const Matrix a = oracle::kron(oracle::sx(), oracle::sy());
    Rng rng(1);
    const auto c = random_element(t, rng);
    const Matrix expected = (a * flatten(c) - flatten(c) * a) / Complex(0, -1);
    CHECK((flatten(r.derivation->apply(c)) - expected).norm() < 1e-10);

    const auto cl = classical_form(p1);
    const auto rc = solve_product_hamiltonian(cl, cl, coordinate(p1, 0), coordinate(p1, 1));
    REQUIRE(rc.success);
    CHECK(std::abs(*rc.lambda) == 0.0);

    const auto rm = solve_product_hamiltonian(cl, q, coordinate(p1, 0), pauli_x());
    CHECK_FALSE(rm.success);
    CHECK(rm.failure_stage == "mixed-case");
    REQUIRE(rm.candidates.size() == 2);
    for (const auto& [lambda, report] : rm.candidates) {
        CHECK_FALSE(report.is_derivation);
        CHECK(report.witness.has_value());
    }
}

TEST_CASE("product bracket examples") {
    const auto cl = classical_form(p1);
    const auto world = classify_worlds(cl, cl);
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    const auto u = tensor_element(q, q * p);
    const auto v = tensor_element(p, AlgebraElement::unit(p1));
    CHECK(approx_equal(product_pb(cl, cl, world, u, v), tensor_element(cl.poisson_bracket(q, p), q * p), 1e-12));

    const auto qf = quantum_form(m2, 1.0);
    const auto qw = classify_worlds(qf, qf);
    const auto id = AlgebraElement::unit(m2);
    CHECK(product_pb(qf, qf, qw, tensor_element(pauli_x(), id), tensor_element(id, pauli_y())).is_zero());

    Rng rng(2);
    const auto t = AlgebraDescriptor::tensor(m2, m2);
    for (int k = 0; k < 10; ++k) {
        const auto x = random_element(t, rng);
        const auto y = random_element(t, rng);
        const Matrix fx = flatten(x);
        const Matrix fy = flatten(y);
        const Matrix expected = (fx * fy - fy * fx) / Complex(0, -1);
        CHECK((flatten(product_pb(qf, qf, qw, x, y)) - expected).norm() < 1e-10);
        CHECK((product_pb(qf, qf, qw, x, y) - symmetrized_pb(qf, qf, x, y)).norm() < 1e-10);
    }

    const auto mixed = classify_worlds(cl, qf);
    CHECK_THROWS_AS(product_pb(cl, qf, mixed, tensor_element(q, pauli_x()), tensor_element(p, pauli_y())),
                    UnclassifiedWorld);
}

TEST_CASE("symmetrized bracket on the mixed world") {
    const auto w = mixed_witness();
    const Bracket sym = [&](const AlgebraElement& a, const AlgebraElement& b) { return symmetrized_pb(w.left, w.right, a, b); };
    // {q⊗σx, p⊗σy}: {q,p}·(σxσy+σyσx)/2 + (qp+pq)/2·{σx,σy}_Q; the first term vanishes.
    const auto q = coordinate(p1, 0);
    const auto p = coordinate(p1, 1);
    const auto value = sym(tensor_element(q, pauli_x()), tensor_element(p, pauli_y()));
    CHECK(approx_equal(value, tensor_element(q * p, -2.0 * pauli_z()), 1e-12));

    const auto jac = jacobiator(sym, w.u, w.v, w.w);
    CHECK(jac.norm() > 1e3 * 1e-9);
    CHECK(approx_equal(jac, tensor_element(AlgebraElement::unit(p1), pauli_y()), 1e-12));
    CHECK(jacobiator(sym, w.u, w.u, w.v).norm() < 1e-12);
}

TEST_CASE("generalized mixed bracket") {
    const auto q = coordinate(p1, 0);
    const auto one = AlgebraElement::unit(p1);
    const Complex b(0, -1);
    CHECK(approx_equal(generalized_mixed_pb(b, tensor_element(q, pauli_x()), tensor_element(one, pauli_y())),
                       tensor_element(q, -2.0 * pauli_z()), 1e-12));
    CHECK(generalized_mixed_pb(b, tensor_element(q * q, AlgebraElement::unit(m2)), tensor_element(q, pauli_y())).is_zero());
    CHECK_THROWS_AS(generalized_mixed_pb(0.0, tensor_element(q, pauli_x()), tensor_element(q, pauli_y())), ZeroParameter);

    Rng rng(3);
    const auto t = AlgebraDescriptor::tensor(p1, m2);
    const Bracket gen = [&](const AlgebraElement& x, const AlgebraElement& y) { return generalized_mixed_pb(b, x, y); };
    for (int k = 0; k < 10; ++k) {
        const auto x = random_element(t, rng, 1);
        const auto y = random_element(t, rng, 1);
        const auto z = random_element(t, rng, 1);
        CHECK(jacobiator(gen, x, y, z).norm() < 1e-9);
        CHECK(approx_equal(gen(x, y * z), gen(x, y) * z + y * gen(x, z), 1e-9));
    }
}
