#include "supmech/tensor_universality.hpp"

#include <cmath>

#include "supmech/central.hpp"
#include "supmech/errors.hpp"

namespace supmech {

namespace {

/// Hermitian inner product of two elements of the same algebra in split coordinates.
Complex element_inner(const AlgebraElement& x, const AlgebraElement& y) {
    auto sx = split_central(x);
    auto sy = split_central(y);
    Complex s{};
    for (const auto& [key, mx] : sx) {
        auto it = sy.find(key);
        if (it == sy.end()) continue;
        s += (mx.conjugate().cwiseProduct(it->second)).sum();
    }
    return s;
}

double element_norm2(const AlgebraElement& x) {
    double s = 0.0;
    for (const auto& [key, m] : split_central(x)) s += m.squaredNorm();
    return s;
}

bool lambdas_agree(Complex a, Complex b) {
    return std::abs(a - b) <= 1e-8 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool is_zero_lambda(Complex a) { return std::abs(a) <= 1e-8; }

struct Fit {
    std::optional<Complex> beta;
    double residual = 0.0;
};

/// Fits ω = β ω_c over the structure's own (inner) basis.
Fit fit_canonical_multiple(const SymplecticStructure& s) {
    Fit fit;
    const auto& basis = s.basis();
    if (!basis.is_inner()) return fit;
    Complex num{};
    double den = 0.0;
    const auto tuples = s.form().index_tuples();
    std::vector<AlgebraElement> canonical;
    for (const auto& t : tuples) {
        auto c = commutator(*basis.inner_generator(t[0]), *basis.inner_generator(t[1]));
        num += element_inner(c, s.form().at(t));
        den += element_norm2(c);
        canonical.push_back(std::move(c));
    }
    if (den == 0.0) return fit;
    const Complex beta = num / den;
    fit.beta = beta;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        fit.residual = std::max(fit.residual, (s.form().at(tuples[i]) - beta * canonical[i]).norm());
    }
    return fit;
}

bool form_is_real(const SymplecticStructure& s) {
    return form_distance(form_star(s.form()), s.form()) <= s.algebra().tolerance() * std::max(1.0, s.form().max_norm());
}

LambdaExtraction fit_lambda(const std::vector<std::pair<AlgebraElement, AlgebraElement>>& pairs, double tol) {
    LambdaExtraction out;
    Complex num{};
    double den = 0.0;
    std::vector<const std::pair<AlgebraElement, AlgebraElement>*> used;
    for (const auto& p : pairs) {
        if (p.first.norm() < 10.0 * tol) {
            ++out.pairs_skipped;
            continue;
        }
        num += element_inner(p.first, p.second);
        den += element_norm2(p.first);
        used.push_back(&p);
    }
    out.pairs_used = used.size();
    if (used.empty()) return out;
    const Complex lambda = num / den;
    out.lambda = lambda;
    for (const auto* p : used) {
        const double r = (lambda * p->first - p->second).norm() / std::max(1.0, p->second.norm());
        out.residual = std::max(out.residual, r);
    }
    return out;
}

}  // namespace

AlgebraElement FactorOperator::apply(const AlgebraElement& a) const {
    if (kind == Kind::Derivation) return derivation->apply(a);
    return *multiplier * a;
}

AlgebraElement CandidateOperator::apply(const AlgebraElement& a) const {
    if (a.algebra() != algebra_) throw AlgebraMismatch("candidate operator applied outside " + algebra_.to_string());
    AlgebraElement::TensorSum out;
    for (const auto& term : terms_) {
        if (term.scale == Complex{}) continue;
        for (const auto& t : a.terms()) {
            auto l = term.left.apply(t.left);
            if (l.is_exactly_zero()) continue;
            auto r = term.right.apply(t.right);
            if (r.is_exactly_zero()) continue;
            out.push_back(TensorTerm{std::move(l), term.scale * r});
        }
    }
    return AlgebraElement(algebra_, std::move(out));
}

LinearMap CandidateOperator::as_map() const {
    return [op = *this](const AlgebraElement& a) { return op.apply(a); };
}

CandidateOperator product_candidate(const Derivation& y_a, const AlgebraElement& a, const Derivation& y_b,
                                    const AlgebraElement& b, Complex lambda) {
    auto algebra = AlgebraDescriptor::tensor(a.algebra(), b.algebra());
    std::vector<CandidateOperator::Term> terms{
        {1.0, FactorOperator::of(y_a), FactorOperator::mu(b)},
        {1.0, FactorOperator::mu(a), FactorOperator::of(y_b)},
        {lambda, FactorOperator::of(y_a), FactorOperator::of(y_b)},
    };
    return CandidateOperator(algebra, std::move(terms));
}

DifferentialForm product_form(const SymplecticStructure& left, const SymplecticStructure& right) {
    for (const auto* s : {&left, &right}) {
        if (s->rank() < s->basis().size()) {
            throw NonDegeneracyFailure("factor structure " + s->label() + " is degenerate",
                                       static_cast<double>(s->basis().size() - s->rank()));
        }
    }
    auto basis = DerivationBasis::product(left.basis(), right.basis());
    const int m1 = static_cast<int>(left.basis().size());
    DifferentialForm form(basis, 2);
    for (const auto& t : form.index_tuples()) {
        if (t[1] < m1) {
            form.set(t, embed_left(left.form().at(t), right.algebra()));
        } else if (t[0] >= m1) {
            form.set(t, embed_right(left.algebra(), right.form().at({t[0] - m1, t[1] - m1})));
        }
    }
    return form;
}

LambdaExtraction extract_lambda(const SymplecticStructure& s, const AlgebraElement& a, std::uint64_t seed,
                                int samples) {
    Rng rng(seed);
    auto y_a = s.hamiltonian_derivation(a);
    std::vector<std::pair<AlgebraElement, AlgebraElement>> pairs;
    for (int k = 0; k < samples; ++k) {
        auto c = random_element(s.algebra(), rng);
        pairs.emplace_back(y_a.apply(c), commutator(c, a));
    }
    return fit_lambda(pairs, s.algebra().tolerance());
}

LambdaExtraction extract_lambda(const SymplecticStructure& s, std::uint64_t seed, int samples) {
    Rng rng(seed);
    std::vector<std::pair<AlgebraElement, AlgebraElement>> pairs;
    for (int k = 0; k < samples; ++k) {
        auto a = random_element(s.algebra(), rng);
        auto c = random_element(s.algebra(), rng);
        pairs.emplace_back(s.poisson_bracket(a, c), commutator(c, a));
    }
    return fit_lambda(pairs, s.algebra().tolerance());
}

std::string to_string(WorldVerdict verdict) {
    switch (verdict) {
        case WorldVerdict::BothCommutative:
            return "BothCommutative";
        case WorldVerdict::BothQuantum:
            return "BothQuantum";
        case WorldVerdict::Inconsistent:
            return "Inconsistent";
    }
    return "?";
}

WorldClassification classify_worlds(const SymplecticStructure& left, const SymplecticStructure& right,
                                    std::uint64_t seed) {
    WorldClassification w;
    w.left_extraction = extract_lambda(left, derive_seed(seed, "left"));
    w.right_extraction = extract_lambda(right, derive_seed(seed, "right"));
    const bool lc = left.algebra().is_commutative();
    const bool rc = right.algebra().is_commutative();
    if (lc && rc) {
        w.verdict = WorldVerdict::BothCommutative;
        w.lambda = 0.0;
        return w;
    }
    if (lc != rc) {
        w.verdict = WorldVerdict::Inconsistent;
        w.reason = "mixed-case";
        return w;
    }
    auto lf = fit_canonical_multiple(left);
    auto rf = fit_canonical_multiple(right);
    w.left_beta = lf.beta;
    w.right_beta = rf.beta;
    w.left_fit_residual = lf.residual;
    w.right_fit_residual = rf.residual;
    w.verdict = WorldVerdict::Inconsistent;
    if (!lf.beta || !rf.beta) {
        w.reason = "non-special";
        return w;
    }
    const double tol = std::min(left.algebra().tolerance(), right.algebra().tolerance());
    if (lf.residual > tol * std::max(1.0, left.form().max_norm()) ||
        rf.residual > tol * std::max(1.0, right.form().max_norm())) {
        w.reason = "not-quantum";
        return w;
    }
    const Complex l1 = -*lf.beta;
    const Complex l2 = -*rf.beta;
    if (is_zero_lambda(l1) || is_zero_lambda(l2)) {
        w.reason = "not-quantum";
        return w;
    }
    if (!lambdas_agree(l1, l2)) {
        w.reason = "lambda-inconsistent";
        return w;
    }
    if (form_is_real(left) && form_is_real(right) && std::abs(l1.real()) > 1e-8 * std::abs(l1)) {
        w.reason = "not-imaginary";
        return w;
    }
    w.verdict = WorldVerdict::BothQuantum;
    w.lambda = 0.5 * (l1 + l2);
    return w;
}

ProductHamiltonianResult solve_product_hamiltonian(const SymplecticStructure& left, const SymplecticStructure& right,
                                                   const AlgebraElement& a, const AlgebraElement& b,
                                                   std::uint64_t seed) {
    ProductHamiltonianResult result;
    result.left_extraction = extract_lambda(left, derive_seed(seed, "left"));
    result.right_extraction = extract_lambda(right, derive_seed(seed, "right"));
    const auto& le = result.left_extraction;
    const auto& re = result.right_extraction;
    const auto y_a = left.hamiltonian_derivation(a);
    const auto y_b = right.hamiltonian_derivation(b);

    auto try_candidate = [&](Complex lambda) {
        auto op = product_candidate(y_a, a, y_b, b, lambda);
        auto report = check_derivation(op.algebra(), op.as_map(), derive_seed(seed, "leibniz"));
        result.candidates.emplace_back(lambda, report);
        return std::make_pair(op, report);
    };

    constexpr double kExtractionTolerance = 1e-8;
    if (le.residual > kExtractionTolerance || re.residual > kExtractionTolerance) {
        result.failure_stage = "lambda-inconsistent";
        if (le.lambda) try_candidate(*le.lambda);
        if (re.lambda) try_candidate(*re.lambda);
        return result;
    }
    std::optional<Complex> lambda;
    if (le.lambda && re.lambda) {
        if (!lambdas_agree(*le.lambda, *re.lambda)) {
            result.failure_stage =
                is_zero_lambda(*le.lambda) != is_zero_lambda(*re.lambda) ? "mixed-case" : "lambda-inconsistent";
            try_candidate(*le.lambda);
            try_candidate(*re.lambda);
            return result;
        }
        lambda = 0.5 * (*le.lambda + *re.lambda);
    } else if (le.lambda) {
        lambda = le.lambda;
    } else if (re.lambda) {
        lambda = re.lambda;
    } else {
        lambda = Complex{};
    }
    if (is_zero_lambda(*lambda)) lambda = Complex{};
    result.lambda = lambda;
    auto [op, report] = try_candidate(*lambda);
    if (!report.is_derivation) {
        result.failure_stage = "not-derivation";
        return result;
    }
    result.success = true;
    result.derivation = Derivation::function(op.algebra(), op.as_map(), "product-hamiltonian");
    return result;
}

namespace {

void require_tensor_of(const AlgebraElement& u, const SymplecticStructure& left, const SymplecticStructure& right) {
    if (!u.is_tensor() || u.algebra().left() != left.algebra() || u.algebra().right() != right.algebra()) {
        throw AlgebraMismatch("bracket argument is not in " + left.algebra().to_string() + " ⊗ " +
                              right.algebra().to_string());
    }
}

}  // namespace

AlgebraElement product_pb(const SymplecticStructure& left, const SymplecticStructure& right,
                          const WorldClassification& world, const AlgebraElement& u, const AlgebraElement& v) {
    if (world.verdict == WorldVerdict::Inconsistent) {
        throw UnclassifiedWorld("product bracket needs a permitted world (" + world.reason + ")");
    }
    require_tensor_of(u, left, right);
    require_tensor_of(v, left, right);
    const Complex lambda = world.lambda;
    AlgebraElement::TensorSum out;
    for (const auto& x : u.terms()) {
        const auto y_a = left.hamiltonian_derivation(x.left);
        const auto y_b = right.hamiltonian_derivation(x.right);
        for (const auto& y : v.terms()) {
            auto ac_bracket = y_a.apply(y.left);
            auto bd_bracket = y_b.apply(y.right);
            out.push_back(TensorTerm{ac_bracket, x.right * y.right});
            out.push_back(TensorTerm{x.left * y.left, bd_bracket});
            if (lambda != Complex{}) out.push_back(TensorTerm{ac_bracket, lambda * bd_bracket});
        }
    }
    return AlgebraElement(u.algebra(), std::move(out));
}

AlgebraElement symmetrized_pb(const SymplecticStructure& left, const SymplecticStructure& right,
                              const AlgebraElement& u, const AlgebraElement& v) {
    require_tensor_of(u, left, right);
    require_tensor_of(v, left, right);
    AlgebraElement::TensorSum out;
    for (const auto& x : u.terms()) {
        const auto y_a = left.hamiltonian_derivation(x.left);
        const auto y_b = right.hamiltonian_derivation(x.right);
        for (const auto& y : v.terms()) {
            out.push_back(TensorTerm{y_a.apply(y.left), 0.5 * (x.right * y.right + y.right * x.right)});
            out.push_back(TensorTerm{0.5 * (x.left * y.left + y.left * x.left), y_b.apply(y.right)});
        }
    }
    return AlgebraElement(u.algebra(), std::move(out));
}

AlgebraElement generalized_mixed_pb(Complex b, const AlgebraElement& u, const AlgebraElement& v) {
    if (b == Complex{}) throw ZeroParameter("the structure parameter b must be nonzero");
    if (u.algebra() != v.algebra()) throw AlgebraMismatch("bracket arguments in different algebras");
    const auto& alg = u.algebra();
    if (!alg.is_tensor() || !alg.left().is_polynomial() || !alg.right().is_matrix()) {
        throw AlgebraMismatch("generalized mixed bracket needs Polynomial ⊗ Matrix, got " + alg.to_string());
    }
    const Complex inv = 1.0 / b;
    AlgebraElement::TensorSum out;
    for (const auto& x : u.terms()) {
        for (const auto& y : v.terms()) {
            auto c = commutator(x.right, y.right);
            if (c.is_exactly_zero()) continue;
            out.push_back(TensorTerm{x.left * y.left, inv * c});
        }
    }
    return AlgebraElement(alg, std::move(out));
}

AlgebraElement jacobiator(const Bracket& bracket, const AlgebraElement& u, const AlgebraElement& v,
                          const AlgebraElement& w) {
    return bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v));
}

MixedWitness mixed_witness() {
    auto p1 = AlgebraDescriptor::polynomial(1);
    auto m2 = AlgebraDescriptor::matrix(2);
    auto q = coordinate(p1, 0);
    auto p = coordinate(p1, 1);
    return MixedWitness{classical_form(p1), quantum_form(m2, 1.0), tensor_element(q, pauli_x()),
                        tensor_element(p, pauli_y()), tensor_element(q * p, pauli_x())};
}

}  // namespace supmech
