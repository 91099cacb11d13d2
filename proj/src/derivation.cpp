#include "supmech/derivation.hpp"

#include <algorithm>
#include <sstream>

#include "supmech/central.hpp"
#include "supmech/errors.hpp"
#include "supmech/morphism.hpp"

namespace supmech {

struct Derivation::Node {
    Kind kind = Kind::Zero;
    AlgebraDescriptor algebra;
    std::optional<AlgebraElement> generator;
    std::vector<Polynomial> components;
    Side side = Side::Left;
    std::optional<Derivation> lifted;
    std::vector<Term> terms;
    LinearMap map;
    std::string label;

    explicit Node(AlgebraDescriptor alg) : algebra(std::move(alg)) {}
};

namespace {

void require_algebra(const AlgebraDescriptor& expected, const AlgebraElement& a) {
    if (a.algebra() != expected) {
        throw AlgebraMismatch("derivation on " + expected.to_string() + " applied to element of " +
                              a.algebra().to_string());
    }
}

AlgebraElement trace_free(const AlgebraElement& g) {
    if (g.is_matrix()) {
        const Matrix& m = g.matrix();
        Complex t = m.trace() / static_cast<double>(m.rows());
        if (t == Complex{}) return g;
        return AlgebraElement(g.algebra(), Matrix(m - t * Matrix::Identity(m.rows(), m.cols())));
    }
    auto split = split_central(g);
    for (auto& [key, m] : split) {
        Complex t = m.trace() / static_cast<double>(m.rows());
        m -= t * Matrix::Identity(m.rows(), m.cols());
    }
    return join_central(g.algebra(), split);
}

}  // namespace

Derivation::Derivation() : Derivation(zero(AlgebraDescriptor::matrix(1))) {}

Derivation Derivation::zero(const AlgebraDescriptor& algebra) {
    auto node = std::make_shared<Node>(algebra);
    node->kind = Kind::Zero;
    return Derivation(node);
}

Derivation Derivation::inner(const AlgebraElement& generator) {
    const auto& alg = generator.algebra();
    if (alg.is_commutative()) {
        throw NoInnerDerivations("every inner derivation of the commutative algebra " + alg.to_string() +
                                 " vanishes");
    }
    auto node = std::make_shared<Node>(alg);
    node->kind = Kind::Inner;
    node->generator = trace_free(generator);
    return Derivation(node);
}

Derivation Derivation::field(const AlgebraDescriptor& algebra, std::vector<Polynomial> components, int degree_bound) {
    if (!algebra.is_polynomial()) throw AlgebraMismatch("vector fields live on polynomial algebras");
    if (static_cast<int>(components.size()) != algebra.num_variables()) {
        throw AlgebraMismatch("vector field needs one component per coordinate");
    }
    for (const auto& c : components) {
        if (c.num_variables() != algebra.num_variables()) throw AlgebraMismatch("component has wrong variable count");
        if (c.degree() > degree_bound) {
            throw DegreeBoundExceeded("vector field component degree " + std::to_string(c.degree()) +
                                      " exceeds bound " + std::to_string(degree_bound));
        }
    }
    auto node = std::make_shared<Node>(algebra);
    node->kind = Kind::Field;
    node->components = std::move(components);
    return Derivation(node);
}

Derivation Derivation::coordinate_field(const AlgebraDescriptor& algebra, int index) {
    const int nv = algebra.num_variables();
    std::vector<Polynomial> components(nv, Polynomial(nv));
    components.at(index) = Polynomial::constant(nv, 1.0);
    return field(algebra, std::move(components));
}

Derivation Derivation::lift_left(const Derivation& x, const AlgebraDescriptor& right) {
    auto node = std::make_shared<Node>(AlgebraDescriptor::tensor(x.algebra(), right));
    node->kind = Kind::Lift;
    node->side = Side::Left;
    node->lifted = x;
    return Derivation(node);
}

Derivation Derivation::lift_right(const AlgebraDescriptor& left, const Derivation& x) {
    auto node = std::make_shared<Node>(AlgebraDescriptor::tensor(left, x.algebra()));
    node->kind = Kind::Lift;
    node->side = Side::Right;
    node->lifted = x;
    return Derivation(node);
}

Derivation Derivation::combination(const AlgebraDescriptor& algebra, std::vector<Term> terms) {
    std::vector<Term> flat;
    auto push = [&](const AlgebraElement& c, const Derivation& d) {
        if (c.is_exactly_zero() || d.kind() == Kind::Zero) return;
        for (auto& t : flat) {
            if (t.derivation.same_node(d)) {
                t.coefficient += c;
                return;
            }
        }
        flat.push_back(Term{c, d});
    };
    for (const auto& t : terms) {
        if (t.derivation.algebra() != algebra || t.coefficient.algebra() != algebra) {
            throw AlgebraMismatch("combination term does not belong to " + algebra.to_string());
        }
        if (t.derivation.kind() == Kind::Combination) {
            for (const auto& inner : t.derivation.terms()) push(t.coefficient * inner.coefficient, inner.derivation);
        } else {
            push(t.coefficient, t.derivation);
        }
    }
    flat.erase(std::remove_if(flat.begin(), flat.end(), [](const Term& t) { return t.coefficient.is_exactly_zero(); }),
               flat.end());
    if (flat.empty()) return zero(algebra);
    auto node = std::make_shared<Node>(algebra);
    node->kind = Kind::Combination;
    node->terms = std::move(flat);
    return Derivation(node);
}

Derivation Derivation::function(const AlgebraDescriptor& algebra, LinearMap map, std::string label) {
    auto node = std::make_shared<Node>(algebra);
    node->kind = Kind::Function;
    node->map = std::move(map);
    node->label = std::move(label);
    return Derivation(node);
}

Derivation::Kind Derivation::kind() const { return node_->kind; }
const AlgebraDescriptor& Derivation::algebra() const { return node_->algebra; }

const AlgebraElement& Derivation::generator() const {
    if (node_->kind != Kind::Inner) throw Error("derivation is not inner");
    return *node_->generator;
}

const std::vector<Polynomial>& Derivation::components() const {
    if (node_->kind != Kind::Field) throw Error("derivation is not a vector field");
    return node_->components;
}

Derivation::Side Derivation::side() const {
    if (node_->kind != Kind::Lift) throw Error("derivation is not a lift");
    return node_->side;
}

const Derivation& Derivation::lifted() const {
    if (node_->kind != Kind::Lift) throw Error("derivation is not a lift");
    return *node_->lifted;
}

const std::vector<Derivation::Term>& Derivation::terms() const {
    if (node_->kind != Kind::Combination) throw Error("derivation is not a combination");
    return node_->terms;
}

const std::string& Derivation::label() const { return node_->label; }

AlgebraElement Derivation::apply(const AlgebraElement& a) const {
    const Node& n = *node_;
    require_algebra(n.algebra, a);
    switch (n.kind) {
        case Kind::Zero:
            return AlgebraElement::zero(n.algebra);
        case Kind::Inner:
            return commutator(*n.generator, a);
        case Kind::Field: {
            const Polynomial& f = a.polynomial();
            Polynomial out(f.num_variables());
            for (std::size_t k = 0; k < n.components.size(); ++k) {
                if (n.components[k].is_zero()) continue;
                Polynomial d = f.derivative(static_cast<int>(k));
                if (d.is_zero()) continue;
                out += n.components[k] * d;
            }
            return AlgebraElement(n.algebra, std::move(out));
        }
        case Kind::Lift: {
            AlgebraElement::TensorSum terms;
            terms.reserve(a.terms().size());
            for (const auto& t : a.terms()) {
                if (n.side == Side::Left) {
                    terms.push_back(TensorTerm{n.lifted->apply(t.left), t.right});
                } else {
                    terms.push_back(TensorTerm{t.left, n.lifted->apply(t.right)});
                }
            }
            return AlgebraElement(n.algebra, std::move(terms));
        }
        case Kind::Combination: {
            AlgebraElement out = AlgebraElement::zero(n.algebra);
            for (const auto& t : n.terms) out += t.coefficient * t.derivation.apply(a);
            return out;
        }
        case Kind::Function: {
            AlgebraElement out = n.map(a);
            require_algebra(n.algebra, out);
            return out;
        }
    }
    throw Error("unknown derivation kind");
}

std::string Derivation::to_string() const {
    std::ostringstream os;
    switch (kind()) {
        case Kind::Zero:
            os << "0";
            break;
        case Kind::Inner:
            os << "D[" << generator().to_string() << "]";
            break;
        case Kind::Field: {
            bool first = true;
            for (std::size_t k = 0; k < components().size(); ++k) {
                if (components()[k].is_zero()) continue;
                if (!first) os << " + ";
                first = false;
                os << "(" << components()[k].to_string() << ")∂" << k;
            }
            if (first) os << "0";
            break;
        }
        case Kind::Lift:
            os << (side() == Side::Left ? "lift_left(" : "lift_right(") << lifted().to_string() << ")";
            break;
        case Kind::Combination: {
            bool first = true;
            for (const auto& t : terms()) {
                if (!first) os << " + ";
                first = false;
                os << "(" << t.coefficient.to_string() << ")·" << t.derivation.to_string();
            }
            break;
        }
        case Kind::Function:
            os << "map<" << label() << ">";
            break;
    }
    return os.str();
}

Derivation inner_derivation(const AlgebraElement& generator) { return Derivation::inner(generator); }

AlgebraElement apply(const Derivation& x, const AlgebraElement& a) { return x.apply(a); }

Derivation lie_bracket(const Derivation& x, const Derivation& y) {
    using K = Derivation::Kind;
    if (x.algebra() != y.algebra()) throw AlgebraMismatch("bracket of derivations on different algebras");
    const auto& alg = x.algebra();
    if (x.kind() == K::Zero || y.kind() == K::Zero) return Derivation::zero(alg);
    if (x.kind() == K::Inner && y.kind() == K::Inner) {
        auto g = commutator(x.generator(), y.generator());
        if (g.is_exactly_zero()) return Derivation::zero(alg);
        return Derivation::inner(g);
    }
    // [X, D_G] = D_{X(G)}
    if (y.kind() == K::Inner && x.kind() != K::Combination) {
        auto g = x.apply(y.generator());
        if (g.is_zero()) return Derivation::zero(alg);
        return Derivation::inner(g);
    }
    if (x.kind() == K::Inner && y.kind() != K::Combination) {
        auto g = y.apply(x.generator());
        if (g.is_zero()) return Derivation::zero(alg);
        return Derivation::inner(-g);
    }
    if (x.kind() == K::Field && y.kind() == K::Field) {
        const int nv = alg.num_variables();
        std::vector<Polynomial> c(nv, Polynomial(nv));
        for (int a = 0; a < nv; ++a) {
            Polynomial v(nv);
            for (int b = 0; b < nv; ++b) {
                v += x.components()[b] * y.components()[a].derivative(b);
                v -= y.components()[b] * x.components()[a].derivative(b);
            }
            c[a] = std::move(v);
        }
        return Derivation::field(alg, std::move(c));
    }
    if (x.kind() == K::Lift && y.kind() == K::Lift) {
        if (x.side() != y.side()) return Derivation::zero(alg);
        auto inner = lie_bracket(x.lifted(), y.lifted());
        if (x.side() == Derivation::Side::Left) return Derivation::lift_left(inner, alg.right());
        return Derivation::lift_right(alg.left(), inner);
    }
    if (x.kind() == K::Combination || y.kind() == K::Combination) {
        // [Σ a_i X_i, Σ b_j Y_j] = Σ a_i b_j [X_i, Y_j] + a_i X_i(b_j) Y_j − b_j Y_j(a_i) X_i
        auto as_terms = [&](const Derivation& d) {
            if (d.kind() == K::Combination) return d.terms();
            return std::vector<Derivation::Term>{{AlgebraElement::unit(alg), d}};
        };
        auto xs = as_terms(x);
        auto ys = as_terms(y);
        std::vector<Derivation::Term> out;
        for (const auto& xi : xs) {
            for (const auto& yj : ys) {
                out.push_back({xi.coefficient * yj.coefficient, lie_bracket(xi.derivation, yj.derivation)});
                auto dy = xi.derivation.apply(yj.coefficient);
                if (!dy.is_exactly_zero()) out.push_back({xi.coefficient * dy, yj.derivation});
                auto dx = yj.derivation.apply(xi.coefficient);
                if (!dx.is_exactly_zero()) out.push_back({-(yj.coefficient * dx), xi.derivation});
            }
        }
        return Derivation::combination(alg, std::move(out));
    }
    return Derivation::function(
        alg, [x, y](const AlgebraElement& a) { return x.apply(y.apply(a)) - y.apply(x.apply(a)); }, "bracket");
}

Derivation derivation_star(const Derivation& x) {
    using K = Derivation::Kind;
    const auto& alg = x.algebra();
    switch (x.kind()) {
        case K::Zero:
            return x;
        case K::Inner:
            return Derivation::inner(-star(x.generator()));
        case K::Field: {
            std::vector<Polynomial> c;
            for (const auto& p : x.components()) c.push_back(p.conj());
            return Derivation::field(alg, std::move(c));
        }
        case K::Lift:
            if (x.side() == Derivation::Side::Left) return Derivation::lift_left(derivation_star(x.lifted()), alg.right());
            return Derivation::lift_right(alg.left(), derivation_star(x.lifted()));
        case K::Combination: {
            std::vector<Derivation::Term> out;
            for (const auto& t : x.terms()) out.push_back({star(t.coefficient), derivation_star(t.derivation)});
            return Derivation::combination(alg, std::move(out));
        }
        case K::Function:
            return Derivation::function(
                alg, [x](const AlgebraElement& a) { return star(x.apply(star(a))); }, x.label() + "*");
    }
    throw Error("unknown derivation kind");
}

Derivation scale(Complex z, const Derivation& x) {
    if (x.kind() == Derivation::Kind::Inner) {
        if (z == Complex{}) return Derivation::zero(x.algebra());
        return Derivation::inner(z * x.generator());
    }
    return Derivation::combination(x.algebra(), {{AlgebraElement::scalar(x.algebra(), z), x}});
}

Derivation add(const Derivation& x, const Derivation& y) {
    if (x.kind() == Derivation::Kind::Inner && y.kind() == Derivation::Kind::Inner) {
        return Derivation::inner(x.generator() + y.generator());
    }
    const auto& alg = x.algebra();
    return Derivation::combination(alg, {{AlgebraElement::unit(alg), x}, {AlgebraElement::unit(alg), y}});
}

Derivation push_forward(const AlgebraMorphism& phi, const Derivation& x) {
    using K = Derivation::Kind;
    if (x.algebra() != phi.source()) throw AlgebraMismatch("push-forward source algebra differs");
    if (phi.kind() == AlgebraMorphism::Kind::Identity) return x;
    const auto& alg = phi.target();
    switch (x.kind()) {
        case K::Zero:
            return Derivation::zero(alg);
        case K::Inner:
            return Derivation::inner(phi(x.generator()));
        case K::Combination: {
            std::vector<Derivation::Term> out;
            for (const auto& t : x.terms()) out.push_back({phi(t.coefficient), push_forward(phi, t.derivation)});
            return Derivation::combination(alg, std::move(out));
        }
        case K::Field: {
            auto inv = phi.inverse();
            std::vector<Polynomial> c;
            for (int b = 0; b < alg.num_variables(); ++b) {
                c.push_back(phi(x.apply(inv(coordinate(alg, b)))).polynomial());
            }
            return Derivation::field(alg, std::move(c));
        }
        default: {
            auto inv = phi.inverse();
            return Derivation::function(
                alg, [phi, inv, x](const AlgebraElement& b) { return phi(x.apply(inv(b))); }, "push_forward");
        }
    }
}

std::vector<AlgebraElement> probe_elements(const AlgebraDescriptor& algebra, std::uint64_t seed) {
    auto out = algebra_basis(algebra, 2);
    Rng rng(seed);
    for (int k = 0; k < 3; ++k) out.push_back(random_element(algebra, rng, 3));
    return out;
}

double action_distance(const Derivation& x, const Derivation& y) {
    if (x.algebra() != y.algebra()) throw AlgebraMismatch("derivations on different algebras");
    double worst = 0.0;
    for (const auto& a : probe_elements(x.algebra())) worst = std::max(worst, (x.apply(a) - y.apply(a)).norm());
    return worst;
}

LeibnizReport check_derivation(const AlgebraDescriptor& algebra, const LinearMap& map, std::uint64_t seed,
                               std::optional<double> tolerance) {
    const double tol = tolerance.value_or(algebra.tolerance());
    Rng rng(seed);

    for (int t = 0; t < 5; ++t) {
        auto a = random_element(algebra, rng);
        auto b = random_element(algebra, rng);
        Complex alpha(rng.uniform(-1, 1), rng.uniform(-1, 1));
        Complex beta(rng.uniform(-1, 1), rng.uniform(-1, 1));
        auto lhs = map(alpha * a + beta * b);
        auto rhs = alpha * map(a) + beta * map(b);
        const double scale = std::max({1.0, lhs.norm(), rhs.norm()});
        if ((lhs - rhs).norm() > tol * scale) throw NotLinear("map fails linearity on random combinations");
    }

    LeibnizReport report;
    auto check = [&](const AlgebraElement& a, const AlgebraElement& b) {
        auto lab = map(a * b);
        auto la_b = map(a) * b;
        auto a_lb = a * map(b);
        const double scale = std::max({1.0, lab.norm(), la_b.norm(), a_lb.norm()});
        const double r = (lab - la_b - a_lb).norm() / scale;
        ++report.samples;
        if (r > report.max_residual) {
            report.max_residual = r;
            if (r > tol) report.witness = std::make_pair(a, b);
        }
    };

    auto basis = algebra_basis(algebra, 2);
    for (const auto& a : basis) {
        for (const auto& b : basis) check(a, b);
    }
    int extra = 20;
    if (report.samples + extra < 50) extra = static_cast<int>(50 - report.samples);
    for (int t = 0; t < extra; ++t) {
        auto a = random_element(algebra, rng, 2);
        auto b = random_element(algebra, rng, 2);
        check(a, b);
    }
    report.is_derivation = report.max_residual <= tol;
    if (report.is_derivation) report.witness.reset();
    return report;
}

LeibnizReport check_derivation(const Derivation& x, std::uint64_t seed) {
    return check_derivation(
        x.algebra(), [&x](const AlgebraElement& a) { return x.apply(a); }, seed);
}

// ------------------------------------------------------------------- basis

struct DerivationBasis::Data {
    AlgebraDescriptor algebra;
    std::vector<Derivation> elements;
    std::vector<int> field_variable;
    std::vector<std::optional<AlgebraElement>> inner;
    std::string signature;

    std::vector<int> field_of_variable;
    std::vector<std::size_t> inner_indices;
    std::vector<AlgebraElement> probes;
    std::vector<AlgebraElement> central_coordinates;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> inner_solver;
    Eigen::MatrixXcd inner_matrix;
    std::vector<Complex> structure;
    std::vector<Complex> star;

    explicit Data(AlgebraDescriptor alg) : algebra(std::move(alg)) {}

    std::vector<AlgebraElement> expand(const Derivation& x) const;
};

namespace {

Eigen::VectorXcd vectorize(const Matrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

}  // namespace

std::vector<AlgebraElement> DerivationBasis::Data::expand(const Derivation& x) const {
    if (x.algebra() != algebra) throw AlgebraMismatch("derivation does not act on " + algebra.to_string());
    const std::size_t m = elements.size();
    std::vector<AlgebraElement> coeffs(m, AlgebraElement::zero(algebra));
    for (std::size_t k = 0; k < m; ++k) {
        if (elements[k].same_node(x)) {
            coeffs[k] = AlgebraElement::unit(algebra);
            return coeffs;
        }
    }
    using K = Derivation::Kind;
    if (x.kind() == K::Zero) return coeffs;
    if (x.kind() == K::Combination) {
        for (const auto& t : x.terms()) {
            auto part = expand(t.derivation);
            for (std::size_t k = 0; k < m; ++k) {
                if (!part[k].is_exactly_zero()) coeffs[k] += t.coefficient * part[k];
            }
        }
        return coeffs;
    }

    const double tol = algebra.tolerance();
    for (std::size_t a = 0; a < central_coordinates.size(); ++a) {
        auto value = x.apply(central_coordinates[a]);
        const int idx = field_of_variable[a];
        if (idx < 0) {
            if (value.norm() > tol) throw NotInSpan("derivation moves a central coordinate", value.norm());
            continue;
        }
        coeffs[idx] = value;
    }

    const int d = matrix_part_dimension(algebra);
    if (probes.empty()) return coeffs;
    const Eigen::Index block = static_cast<Eigen::Index>(d) * d;
    std::map<std::vector<int>, Eigen::VectorXcd> rhs;
    for (std::size_t r = 0; r < probes.size(); ++r) {
        for (const auto& [key, mat] : split_central(x.apply(probes[r]))) {
            auto it = rhs.find(key);
            if (it == rhs.end()) {
                it = rhs.emplace(key, Eigen::VectorXcd::Zero(block * static_cast<Eigen::Index>(probes.size()))).first;
            }
            it->second.segment(static_cast<Eigen::Index>(r) * block, block) = vectorize(mat);
        }
    }
    double worst = 0.0;
    double scale = 1.0;
    for (const auto& [key, y] : rhs) {
        scale = std::max(scale, y.norm());
        if (inner_indices.empty()) {
            worst = std::max(worst, y.norm());
            continue;
        }
        Eigen::VectorXcd sol = inner_solver.solve(y);
        worst = std::max(worst, (inner_matrix * sol - y).norm());
        for (std::size_t k = 0; k < inner_indices.size(); ++k) {
            if (sol[static_cast<Eigen::Index>(k)] == Complex{}) continue;
            coeffs[inner_indices[k]] += central_monomial(algebra, key, sol[static_cast<Eigen::Index>(k)]);
        }
    }
    if (worst > tol * scale) {
        throw NotInSpan("derivation is not in the span of " + signature, worst);
    }
    return coeffs;
}

DerivationBasis DerivationBasis::build(const AlgebraDescriptor& algebra, std::vector<Derivation> elements,
                                       std::vector<int> field_variable,
                                       std::vector<std::optional<AlgebraElement>> inner, std::string signature,
                                       bool check_closure) {
    auto data = std::make_shared<Data>(algebra);
    data->elements = std::move(elements);
    data->field_variable = std::move(field_variable);
    data->inner = std::move(inner);
    data->signature = std::move(signature);
    const std::size_t m = data->elements.size();

    const int nv = central_variable_count(algebra);
    data->field_of_variable.assign(nv, -1);
    for (int a = 0; a < nv; ++a) data->central_coordinates.push_back(central_coordinate(algebra, a));
    for (std::size_t k = 0; k < m; ++k) {
        if (data->field_variable[k] >= 0) data->field_of_variable[data->field_variable[k]] = static_cast<int>(k);
        if (data->inner[k]) data->inner_indices.push_back(k);
    }

    const int d = matrix_part_dimension(algebra);
    if (d > 1) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                Matrix e = Matrix::Zero(d, d);
                e(i, j) = 1.0;
                data->probes.push_back(matrix_part_element(algebra, e));
            }
        }
        const Eigen::Index block = static_cast<Eigen::Index>(d) * d;
        data->inner_matrix = Eigen::MatrixXcd::Zero(block * block, static_cast<Eigen::Index>(data->inner_indices.size()));
        const std::vector<int> zero_key(nv, 0);
        for (std::size_t c = 0; c < data->inner_indices.size(); ++c) {
            const auto& g = *data->inner[data->inner_indices[c]];
            for (std::size_t r = 0; r < data->probes.size(); ++r) {
                auto split = split_central(commutator(g, data->probes[r]));
                for (const auto& [key, mat] : split) {
                    if (key != zero_key && mat.norm() > 0.0) {
                        throw Unsupported("inner basis generators must be constant in the central variables");
                    }
                    if (key == zero_key) {
                        data->inner_matrix.block(static_cast<Eigen::Index>(r) * block, static_cast<Eigen::Index>(c),
                                                 block, 1) = vectorize(mat);
                    }
                }
            }
        }
        data->inner_solver.compute(data->inner_matrix);
        data->inner_solver.setThreshold(1e-10);
        if (data->inner_solver.rank() < static_cast<Eigen::Index>(data->inner_indices.size())) {
            throw Error("inner basis generators are linearly dependent modulo the center");
        }
    }

    const double tol = algebra.tolerance();
    data->structure.assign(m * m * m, Complex{});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            auto bracket = lie_bracket(data->elements[i], data->elements[j]);
            std::vector<AlgebraElement> coeffs;
            try {
                coeffs = data->expand(bracket);
            } catch (const NotInSpan& e) {
                if (check_closure) {
                    throw NotLieSubalgebra("[X" + std::to_string(i) + ", X" + std::to_string(j) +
                                           "] leaves the span (residual " + std::to_string(e.residual()) + ")");
                }
                throw;
            }
            for (std::size_t k = 0; k < m; ++k) {
                auto s = scalar_value(coeffs[k], tol);
                if (!s) throw Unsupported("structure constants are not scalars");
                data->structure[(i * m + j) * m + k] = *s;
                data->structure[(j * m + i) * m + k] = -*s;
            }
        }
    }
    data->star.assign(m * m, Complex{});
    for (std::size_t i = 0; i < m; ++i) {
        auto coeffs = data->expand(derivation_star(data->elements[i]));
        for (std::size_t k = 0; k < m; ++k) {
            auto s = scalar_value(coeffs[k], tol);
            if (!s) throw Unsupported("involution table is not scalar");
            data->star[i * m + k] = *s;
        }
    }
    return DerivationBasis(std::move(data));
}

std::vector<Matrix> gell_mann_matrices(int n) {
    std::vector<Matrix> out;
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            Matrix s = Matrix::Zero(n, n);
            s(j, k) = 1.0;
            s(k, j) = 1.0;
            out.push_back(s);
            Matrix a = Matrix::Zero(n, n);
            a(j, k) = Complex(0, -1);
            a(k, j) = Complex(0, 1);
            out.push_back(a);
        }
    }
    for (int l = 1; l < n; ++l) {
        Matrix d = Matrix::Zero(n, n);
        const double c = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) d(j, j) = c;
        d(l, l) = -c * l;
        out.push_back(d);
    }
    return out;
}

DerivationBasis DerivationBasis::gell_mann(const AlgebraDescriptor& algebra) {
    if (!algebra.is_matrix()) throw NotSpecial("Gell-Mann bases need a matrix algebra");
    std::vector<Derivation> elements;
    std::vector<std::optional<AlgebraElement>> inner;
    for (const auto& g : gell_mann_matrices(algebra.dimension())) {
        AlgebraElement e(algebra, g);
        elements.push_back(Derivation::inner(e));
        inner.emplace_back(e);
    }
    std::vector<int> fields(elements.size(), -1);
    return build(algebra, std::move(elements), std::move(fields), std::move(inner),
                 "gell-mann(" + std::to_string(algebra.dimension()) + ")", false);
}

DerivationBasis DerivationBasis::coordinate(const AlgebraDescriptor& algebra) {
    if (!algebra.is_polynomial()) throw AlgebraMismatch("coordinate bases need a polynomial algebra");
    std::vector<Derivation> elements;
    std::vector<int> fields;
    for (int a = 0; a < algebra.num_variables(); ++a) {
        elements.push_back(Derivation::coordinate_field(algebra, a));
        fields.push_back(a);
    }
    std::vector<std::optional<AlgebraElement>> inner(elements.size());
    return build(algebra, std::move(elements), std::move(fields), std::move(inner),
                 "coordinate(" + std::to_string(algebra.num_pairs()) + ")", false);
}

DerivationBasis DerivationBasis::natural(const AlgebraDescriptor& algebra) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return gell_mann(algebra);
        case AlgebraDescriptor::Kind::Polynomial:
            return coordinate(algebra);
        case AlgebraDescriptor::Kind::Tensor:
            return product(natural(algebra.left()), natural(algebra.right()));
    }
    throw Error("unknown algebra kind");
}

DerivationBasis DerivationBasis::product(const DerivationBasis& left, const DerivationBasis& right) {
    const auto& la = left.algebra();
    const auto& ra = right.algebra();
    auto algebra = AlgebraDescriptor::tensor(la, ra);
    const int left_vars = central_variable_count(la);
    std::vector<Derivation> elements;
    std::vector<int> fields;
    std::vector<std::optional<AlgebraElement>> inner;
    for (std::size_t k = 0; k < left.size(); ++k) {
        if (const auto& g = left.inner_generator(k)) {
            auto lifted = embed_left(*g, ra);
            elements.push_back(Derivation::inner(lifted));
            inner.emplace_back(lifted);
            fields.push_back(-1);
        } else {
            elements.push_back(Derivation::lift_left(left[k], ra));
            inner.emplace_back();
            fields.push_back(left.data_->field_variable[k]);
        }
    }
    for (std::size_t k = 0; k < right.size(); ++k) {
        if (const auto& g = right.inner_generator(k)) {
            auto lifted = embed_right(la, *g);
            elements.push_back(Derivation::inner(lifted));
            inner.emplace_back(lifted);
            fields.push_back(-1);
        } else {
            elements.push_back(Derivation::lift_right(la, right[k]));
            inner.emplace_back();
            const int v = right.data_->field_variable[k];
            fields.push_back(v < 0 ? -1 : v + left_vars);
        }
    }
    return build(algebra, std::move(elements), std::move(fields), std::move(inner),
                 "product(" + left.signature() + "," + right.signature() + ")", false);
}

DerivationBasis DerivationBasis::subalgebra(const AlgebraDescriptor& algebra,
                                            const std::vector<AlgebraElement>& generators, const std::string& name) {
    if (generators.empty()) throw NotLieSubalgebra("empty generator list");
    std::vector<Derivation> elements;
    std::vector<std::optional<AlgebraElement>> inner;
    std::string fingerprint;
    for (const auto& g : generators) {
        if (g.algebra() != algebra) throw AlgebraMismatch("generator outside " + algebra.to_string());
        auto d = Derivation::inner(g);
        elements.push_back(d);
        inner.emplace_back(d.generator());
        fingerprint += g.to_string() + ";";
    }
    std::vector<int> fields(elements.size(), -1);
    std::ostringstream sig;
    sig << name << "(" << algebra.to_string() << "," << std::hex << stable_hash(fingerprint) << ")";
    return build(algebra, std::move(elements), std::move(fields), std::move(inner), sig.str(), true);
}

const AlgebraDescriptor& DerivationBasis::algebra() const { return data_->algebra; }
std::size_t DerivationBasis::size() const { return data_->elements.size(); }
const Derivation& DerivationBasis::operator[](std::size_t i) const { return data_->elements.at(i); }
const std::vector<Derivation>& DerivationBasis::elements() const { return data_->elements; }
const std::string& DerivationBasis::signature() const { return data_->signature; }

Complex DerivationBasis::structure_constant(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t m = size();
    return data_->structure[(i * m + j) * m + k];
}

Complex DerivationBasis::star_coefficient(std::size_t i, std::size_t k) const { return data_->star[i * size() + k]; }

std::vector<AlgebraElement> DerivationBasis::expand(const Derivation& x) const { return data_->expand(x); }

Derivation DerivationBasis::from_coefficients(const std::vector<AlgebraElement>& coefficients) const {
    if (coefficients.size() != size()) throw BasisMismatch("coefficient count differs from basis size");
    std::vector<Derivation::Term> terms;
    for (std::size_t k = 0; k < size(); ++k) {
        if (!coefficients[k].is_exactly_zero()) terms.push_back({coefficients[k], data_->elements[k]});
    }
    return Derivation::combination(algebra(), std::move(terms));
}

const std::optional<AlgebraElement>& DerivationBasis::inner_generator(std::size_t i) const {
    return data_->inner.at(i);
}

bool DerivationBasis::is_inner() const { return data_->inner_indices.size() == size(); }

double DerivationBasis::jacobi_residual() const {
    const std::size_t m = size();
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t r = 0; r < m; ++r) {
                    Complex s{};
                    for (std::size_t l = 0; l < m; ++l) {
                        s += structure_constant(i, j, l) * structure_constant(l, k, r);
                        s += structure_constant(j, k, l) * structure_constant(l, i, r);
                        s += structure_constant(k, i, l) * structure_constant(l, j, r);
                    }
                    worst = std::max(worst, std::abs(s));
                }
            }
        }
    }
    return worst;
}

Derivation random_derivation(const DerivationBasis& basis, Rng& rng, int max_degree) {
    const auto& alg = basis.algebra();
    const int nv = central_variable_count(alg);
    std::vector<AlgebraElement> coeffs;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        AlgebraElement c = AlgebraElement::zero(alg);
        auto monomials = nv > 0 ? monomials_up_to(nv, max_degree) : std::vector<std::vector<int>>{{}};
        for (const auto& e : monomials) {
            double re = rng.uniform(-1.0, 1.0);
            double im = rng.uniform(-1.0, 1.0);
            c += central_monomial(alg, e, Complex(re, im));
        }
        coeffs.push_back(std::move(c));
    }
    return basis.from_coefficients(coeffs);
}

}  // namespace supmech
