#include "supmech/states.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "supmech/errors.hpp"

namespace supmech {

namespace {

bool is_flat(const AlgebraDescriptor& alg) { return alg.flat_dimension().has_value(); }

/// Polynomial ⊗ Matrix, the only non-flattenable tensor shape states support.
bool is_poly_matrix(const AlgebraDescriptor& alg) {
    return alg.is_tensor() && alg.left().is_polynomial() && alg.right().is_matrix();
}

void require_same(const AlgebraDescriptor& a, const AlgebraDescriptor& b, const char* where) {
    if (a != b) throw AlgebraMismatch(std::string(where) + ": " + a.to_string() + " vs " + b.to_string());
}

Eigen::VectorXcd random_unit_vector(int n, Rng& rng) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return v / v.norm();
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// Orthonormal eigenvectors of the Hermitian part, eigenvalues ascending.
Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigen(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(hermitian_part(m));
}

/// The tensor element a evaluated at a phase point of its polynomial factor.
Matrix evaluate_left(const AlgebraElement& a, std::span<const double> x) {
    const int n = a.algebra().right().dimension();
    Matrix m = Matrix::Zero(n, n);
    for (const auto& t : a.terms()) m += t.left.polynomial().evaluate(x) * t.right.matrix();
    return m;
}

/// Lattice {-2..2}^d followed by random points in [-3, 3]^d.
std::vector<std::vector<double>> search_points(int d, Rng& rng) {
    std::vector<std::vector<double>> out;
    if (d <= 4) {
        std::vector<int> idx(d, -2);
        while (true) {
            out.emplace_back(idx.begin(), idx.end());
            int k = 0;
            while (k < d && idx[k] == 2) idx[k++] = -2;
            if (k == d) break;
            ++idx[k];
        }
    }
    for (int r = 0; r < 64; ++r) {
        std::vector<double> x(d);
        for (auto& v : x) v = rng.uniform(-3.0, 3.0);
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

StateFunctional StateFunctional::density_matrix(const AlgebraDescriptor& algebra, Matrix rho) {
    const auto dim = algebra.flat_dimension();
    if (!dim) throw Unsupported("density matrices need a matrix algebra, got " + algebra.to_string());
    if (rho.rows() != *dim || rho.cols() != *dim) throw AlgebraMismatch("density matrix size does not match algebra");
    StateFunctional s(Kind::DensityMatrix, algebra);
    s.rho_ = std::move(rho);
    return s;
}

StateFunctional StateFunctional::pure(const AlgebraDescriptor& algebra, const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd v = psi / psi.norm();
    return density_matrix(algebra, v * v.adjoint());
}

StateFunctional StateFunctional::phase_point(const AlgebraDescriptor& algebra, std::vector<double> point) {
    return phase_ensemble(algebra, {PhasePoint{std::move(point), 1.0}});
}

StateFunctional StateFunctional::phase_ensemble(const AlgebraDescriptor& algebra, std::vector<PhasePoint> points) {
    if (!algebra.is_polynomial()) throw Unsupported("phase ensembles need a polynomial algebra, got " + algebra.to_string());
    for (const auto& p : points) {
        if (static_cast<int>(p.point.size()) != algebra.num_variables()) {
            throw AlgebraMismatch("phase point has " + std::to_string(p.point.size()) + " coordinates, expected " +
                                  std::to_string(algebra.num_variables()));
        }
    }
    StateFunctional s(Kind::PhaseEnsemble, algebra);
    s.points_ = std::move(points);
    return s;
}

StateFunctional StateFunctional::product(const StateFunctional& left, const StateFunctional& right) {
    StateFunctional s(Kind::Product, AlgebraDescriptor::tensor(left.algebra(), right.algebra()));
    s.left_ = std::make_shared<const StateFunctional>(left);
    s.right_ = std::make_shared<const StateFunctional>(right);
    return s;
}

const Matrix& StateFunctional::density() const {
    if (kind_ != Kind::DensityMatrix) throw Unsupported("state is not a density matrix");
    return rho_;
}

const std::vector<PhasePoint>& StateFunctional::points() const {
    if (kind_ != Kind::PhaseEnsemble) throw Unsupported("state is not a phase ensemble");
    return points_;
}

const StateFunctional& StateFunctional::left() const {
    if (kind_ != Kind::Product) throw Unsupported("state is not a product");
    return *left_;
}

const StateFunctional& StateFunctional::right() const {
    if (kind_ != Kind::Product) throw Unsupported("state is not a product");
    return *right_;
}

bool StateFunctional::is_pure() const {
    const double tol = std::max(algebra_.tolerance(), 1e-9);
    switch (kind_) {
        case Kind::DensityMatrix: {
            auto ev = hermitian_eigen(rho_).eigenvalues();
            return std::abs(ev(ev.size() - 1) - 1.0) <= tol && std::abs(ev.head(ev.size() - 1).sum()) <= tol;
        }
        case Kind::PhaseEnsemble: {
            int support = 0;
            for (const auto& p : points_) support += p.weight > tol;
            if (support <= 1) return true;
            // Coincident support points still form a Dirac measure.
            const PhasePoint* first = nullptr;
            for (const auto& p : points_) {
                if (p.weight <= tol) continue;
                if (!first) {
                    first = &p;
                    continue;
                }
                for (std::size_t i = 0; i < p.point.size(); ++i) {
                    if (std::abs(p.point[i] - first->point[i]) > tol) return false;
                }
            }
            return true;
        }
        case Kind::Product:
            return left_->is_pure() && right_->is_pure();
    }
    return false;
}

StateFunctional StateFunctional::as_density() const {
    if (kind_ == Kind::DensityMatrix) return *this;
    if (kind_ == Kind::Product) {
        auto l = left_->as_density();
        auto r = right_->as_density();
        const Matrix& a = l.rho_;
        const Matrix& b = r.rho_;
        Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i = 0; i < a.rows(); ++i) {
            for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
        return density_matrix(algebra_, std::move(k));
    }
    throw Unsupported("phase ensembles have no density matrix");
}

std::string StateFunctional::to_string() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::DensityMatrix:
            os << "rho" << rho_.rows() << "[";
            for (int i = 0; i < rho_.rows(); ++i) {
                for (int j = 0; j < rho_.cols(); ++j) os << (i || j ? " " : "") << rho_(i, j);
            }
            os << "]";
            break;
        case Kind::PhaseEnsemble:
            os << "ensemble{";
            for (std::size_t k = 0; k < points_.size(); ++k) {
                os << (k ? ", " : "") << points_[k].weight << "@(";
                for (std::size_t i = 0; i < points_[k].point.size(); ++i) os << (i ? "," : "") << points_[k].point[i];
                os << ")";
            }
            os << "}";
            break;
        case Kind::Product:
            os << left_->to_string() << " ⊗ " << right_->to_string();
            break;
    }
    return os.str();
}

Complex expectation(const StateFunctional& phi, const AlgebraElement& a) {
    require_same(phi.algebra(), a.algebra(), "expectation");
    switch (phi.kind()) {
        case StateFunctional::Kind::DensityMatrix:
            return (phi.density() * flatten(a)).trace();
        case StateFunctional::Kind::PhaseEnsemble: {
            Complex s{};
            for (const auto& p : phi.points()) s += p.weight * a.polynomial().evaluate(std::span<const double>(p.point));
            return s;
        }
        case StateFunctional::Kind::Product: {
            Complex s{};
            for (const auto& t : a.terms()) s += expectation(phi.left(), t.left) * expectation(phi.right(), t.right);
            return s;
        }
    }
    return {};
}

StateDiagnostics is_state(const StateFunctional& phi, std::uint64_t seed) {
    StateDiagnostics d;
    const double tol = phi.algebra().tolerance();
    auto fail = [&](const std::string& why) {
        if (d.is_state) d.reason = why;
        d.is_state = false;
    };
    switch (phi.kind()) {
        case StateFunctional::Kind::DensityMatrix: {
            const Matrix& rho = phi.density();
            d.hermiticity_defect = (rho - rho.adjoint()).norm();
            d.trace_defect = std::abs(rho.trace() - Complex(1.0));
            d.min_eigenvalue = hermitian_eigen(rho).eigenvalues()(0);
            if (d.hermiticity_defect > tol * std::max(1.0, rho.norm())) fail("not Hermitian");
            if (d.trace_defect > tol) fail("trace is not 1");
            if (d.min_eigenvalue < -tol) fail("negative eigenvalue");
            break;
        }
        case StateFunctional::Kind::PhaseEnsemble: {
            double total = 0.0;
            double min_weight = std::numeric_limits<double>::infinity();
            for (const auto& p : phi.points()) {
                total += p.weight;
                min_weight = std::min(min_weight, p.weight);
                for (double x : p.point) {
                    if (!std::isfinite(x)) fail("non-finite phase point");
                }
            }
            d.trace_defect = std::abs(total - 1.0);
            d.min_eigenvalue = phi.points().empty() ? 0.0 : min_weight;
            if (phi.points().empty()) fail("empty ensemble");
            if (d.min_eigenvalue < -tol) fail("negative weight");
            if (d.trace_defect > tol) fail("weights do not sum to 1");
            break;
        }
        case StateFunctional::Kind::Product: {
            auto l = is_state(phi.left(), derive_seed(seed, "left"));
            auto r = is_state(phi.right(), derive_seed(seed, "right"));
            d.hermiticity_defect = std::max(l.hermiticity_defect, r.hermiticity_defect);
            d.trace_defect = std::max(l.trace_defect, r.trace_defect);
            d.min_eigenvalue = std::min(l.min_eigenvalue, r.min_eigenvalue);
            if (!l.is_state) fail("left factor: " + l.reason);
            if (!r.is_state) fail("right factor: " + r.reason);
            break;
        }
    }
    Rng rng(seed);
    d.min_positivity = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
        auto a = random_element(phi.algebra(), rng);
        const Complex v = expectation(phi, star(a) * a);
        d.min_positivity = std::min(d.min_positivity, v.real());
        const double scale = std::max(1.0, a.norm() * a.norm());
        if (v.real() < -tol * scale) fail("negative on a*a");
        if (std::abs(v.imag()) > std::sqrt(tol) * scale) fail("not real on a*a");
    }
    return d;
}

StateFunctional mix(const std::vector<std::pair<double, StateFunctional>>& parts) {
    if (parts.empty()) throw Unsupported("empty mixture");
    const auto& alg = parts.front().second.algebra();
    double total = 0.0;
    for (const auto& [w, s] : parts) {
        require_same(alg, s.algebra(), "mix");
        if (w < 0.0) throw Unsupported("negative mixture weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Unsupported("mixture weights do not sum to 1");
    if (alg.is_polynomial()) {
        std::vector<PhasePoint> points;
        for (const auto& [w, s] : parts) {
            for (const auto& p : s.points()) points.push_back(PhasePoint{p.point, w * p.weight});
        }
        return StateFunctional::phase_ensemble(alg, std::move(points));
    }
    if (is_flat(alg)) {
        const int n = *alg.flat_dimension();
        Matrix rho = Matrix::Zero(n, n);
        for (const auto& [w, s] : parts) rho += w * s.as_density().density();
        return StateFunctional::density_matrix(alg, std::move(rho));
    }
    throw Unsupported("mixtures of product states on " + alg.to_string());
}

StateFunctional transport_state(const AlgebraMorphism& phi, const StateFunctional& state) {
    require_same(phi.source(), state.algebra(), "transport_state");
    if (phi.kind() == AlgebraMorphism::Kind::Identity) return state;
    const auto& alg = state.algebra();
    if (is_flat(alg)) {
        // ρ' is fixed by Tr(ρ' E_ij) = Tr(ρ Φ(E_ij)).
        const Matrix& rho = state.kind() == StateFunctional::Kind::DensityMatrix ? state.density()
                                                                                  : state.as_density().density();
        const int n = *alg.flat_dimension();
        Matrix out(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Matrix e = Matrix::Zero(n, n);
                e(i, j) = 1.0;
                out(j, i) = (rho * flatten(phi(unflatten(alg, e)))).trace();
            }
        }
        return StateFunctional::density_matrix(alg, std::move(out));
    }
    if (alg.is_polynomial()) {
        // Point evaluation composed with a homomorphism is again a point evaluation.
        std::vector<Polynomial> images;
        for (int i = 0; i < alg.num_variables(); ++i) images.push_back(phi(coordinate(alg, i)).polynomial());
        std::vector<PhasePoint> points;
        for (const auto& p : state.points()) {
            PhasePoint q{std::vector<double>(p.point.size()), p.weight};
            for (std::size_t i = 0; i < images.size(); ++i) {
                const Complex v = images[i].evaluate(std::span<const double>(p.point));
                if (std::abs(v.imag()) > alg.tolerance() * std::max(1.0, std::abs(v))) {
                    throw NotIsomorphism("transported phase point is not real");
                }
                q.point[i] = v.real();
            }
            points.push_back(std::move(q));
        }
        return StateFunctional::phase_ensemble(alg, std::move(points));
    }
    throw Unsupported("state transport on " + alg.to_string());
}

double state_distance(const StateFunctional& a, const StateFunctional& b) {
    require_same(a.algebra(), b.algebra(), "state_distance");
    if (a.kind() != b.kind()) {
        if (is_flat(a.algebra())) return (a.as_density().density() - b.as_density().density()).norm();
        return std::numeric_limits<double>::infinity();
    }
    switch (a.kind()) {
        case StateFunctional::Kind::DensityMatrix:
            return (a.density() - b.density()).norm();
        case StateFunctional::Kind::PhaseEnsemble: {
            if (a.points().size() != b.points().size()) return std::numeric_limits<double>::infinity();
            double d = 0.0;
            for (std::size_t k = 0; k < a.points().size(); ++k) {
                const auto& p = a.points()[k];
                const auto& q = b.points()[k];
                d = std::max(d, std::abs(p.weight - q.weight));
                for (std::size_t i = 0; i < p.point.size(); ++i) d = std::max(d, std::abs(p.point[i] - q.point[i]));
            }
            return d;
        }
        case StateFunctional::Kind::Product:
            return std::max(state_distance(a.left(), b.left()), state_distance(a.right(), b.right()));
    }
    return 0.0;
}

std::pair<StateFunctional, double> separating_state(const AlgebraElement& a, const AlgebraElement& b,
                                                    std::uint64_t seed) {
    require_same(a.algebra(), b.algebra(), "separating_state");
    const auto& alg = a.algebra();
    const auto diff = a - b;
    Rng rng(seed);
    if (is_flat(alg)) {
        auto es = hermitian_eigen(flatten(diff));
        const auto& ev = es.eigenvalues();
        const int k = std::abs(ev(0)) >= std::abs(ev(ev.size() - 1)) ? 0 : static_cast<int>(ev.size()) - 1;
        auto best = StateFunctional::pure(alg, es.eigenvectors().col(k));
        double gap = std::abs(expectation(best, diff));
        for (int r = 0; r < 16; ++r) {
            auto s = StateFunctional::pure(alg, random_unit_vector(*alg.flat_dimension(), rng));
            const double g = std::abs(expectation(s, diff));
            if (g > gap) {
                gap = g;
                best = s;
            }
        }
        return {best, gap};
    }
    if (alg.is_polynomial()) {
        std::vector<double> best_point(alg.num_variables(), 0.0);
        double gap = -1.0;
        for (auto& x : search_points(alg.num_variables(), rng)) {
            const double g = std::abs(diff.polynomial().evaluate(std::span<const double>(x)));
            if (g > gap) {
                gap = g;
                best_point = std::move(x);
            }
        }
        return {StateFunctional::phase_point(alg, best_point), gap};
    }
    if (is_poly_matrix(alg)) {
        std::optional<StateFunctional> best;
        double gap = -1.0;
        for (auto& x : search_points(alg.left().num_variables(), rng)) {
            auto es = hermitian_eigen(evaluate_left(diff, x));
            const auto& ev = es.eigenvalues();
            const int k = std::abs(ev(0)) >= std::abs(ev(ev.size() - 1)) ? 0 : static_cast<int>(ev.size()) - 1;
            auto s = StateFunctional::product(StateFunctional::phase_point(alg.left(), x),
                                              StateFunctional::pure(alg.right(), es.eigenvectors().col(k)));
            const double g = std::abs(expectation(s, diff));
            if (g > gap) {
                gap = g;
                best = s;
            }
        }
        return {*best, gap};
    }
    throw Unsupported("pure-state search on " + alg.to_string());
}

std::pair<AlgebraElement, double> separating_observable(const StateFunctional& phi, const StateFunctional& psi) {
    require_same(phi.algebra(), psi.algebra(), "separating_observable");
    const auto& alg = phi.algebra();
    std::vector<AlgebraElement> candidates;
    if (is_flat(alg)) {
        // Projectors onto an orthonormal basis that contains ψ when ψ is pure.
        auto es = hermitian_eigen(psi.as_density().density());
        for (int k = static_cast<int>(es.eigenvalues().size()) - 1; k >= 0; --k) {
            const Eigen::VectorXcd v = es.eigenvectors().col(k);
            candidates.push_back(unflatten(alg, v * v.adjoint()));
        }
        auto es2 = hermitian_eigen(phi.as_density().density());
        for (int k = static_cast<int>(es2.eigenvalues().size()) - 1; k >= 0; --k) {
            const Eigen::VectorXcd v = es2.eigenvectors().col(k);
            candidates.push_back(unflatten(alg, v * v.adjoint()));
        }
    } else if (alg.is_polynomial()) {
        for (int i = 0; i < alg.num_variables(); ++i) {
            auto x = coordinate(alg, i);
            candidates.push_back(x);
            candidates.push_back(x * x);
        }
    } else if (is_poly_matrix(alg)) {
        const auto& pl = alg.left();
        const auto& mr = alg.right();
        std::vector<AlgebraElement> left{AlgebraElement::unit(pl)};
        for (int i = 0; i < pl.num_variables(); ++i) {
            left.push_back(coordinate(pl, i));
            left.push_back(coordinate(pl, i) * coordinate(pl, i));
        }
        std::vector<AlgebraElement> right{AlgebraElement::unit(mr)};
        for (const auto* s : {&psi, &phi}) {
            if (s->kind() != StateFunctional::Kind::Product) continue;
            auto es = hermitian_eigen(s->right().as_density().density());
            for (int k = 0; k < es.eigenvalues().size(); ++k) {
                const Eigen::VectorXcd v = es.eigenvectors().col(k);
                right.push_back(AlgebraElement(mr, Matrix(v * v.adjoint())));
            }
        }
        for (const auto& l : left) {
            for (const auto& r : right) candidates.push_back(tensor_element(l, r));
        }
    } else {
        throw Unsupported("observable search on " + alg.to_string());
    }
    std::optional<AlgebraElement> best;
    double gap = -1.0;
    for (const auto& c : candidates) {
        const double g = std::abs(expectation(phi, c) - expectation(psi, c));
        if (g > gap) {
            gap = g;
            best = c;
        }
    }
    return {*best, gap};
}

CCReport cc_check(const AlgebraDescriptor& algebra, const std::vector<AlgebraElement>& observables,
                  const std::vector<StateFunctional>& pure_states, std::uint64_t seed) {
    CCReport report;
    const double tol = algebra.tolerance();
    report.min_observable_gap = std::numeric_limits<double>::infinity();
    report.min_state_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < observables.size(); ++k) {
        const auto& a = observables[k];
        const auto& b = observables[k + 1];
        if ((a - b).norm() <= tol) {
            ++report.observable_pairs_skipped;
            continue;
        }
        ++report.observable_pairs;
        auto [state, gap] = separating_state(a, b, derive_seed(seed, "observable-" + std::to_string(k)));
        report.min_observable_gap = std::min(report.min_observable_gap, gap);
        if (gap <= tol) {
            ++report.observable_unseparated;
            report.unseparated.push_back({"no pure state separates observables", a.to_string(), b.to_string()});
        }
    }
    for (std::size_t k = 0; k + 1 < pure_states.size(); ++k) {
        const auto& phi = pure_states[k];
        const auto& psi = pure_states[k + 1];
        require_same(algebra, phi.algebra(), "cc_check");
        if (state_distance(phi, psi) <= tol) {
            ++report.state_pairs_skipped;
            continue;
        }
        ++report.state_pairs;
        auto [obs, gap] = separating_observable(phi, psi);
        report.min_state_gap = std::min(report.min_state_gap, gap);
        if (gap <= tol) {
            ++report.state_unseparated;
            report.unseparated.push_back({"no observable separates states", phi.to_string(), psi.to_string()});
        }
    }
    if (report.observable_pairs == 0) report.min_observable_gap = 0.0;
    if (report.state_pairs == 0) report.min_state_gap = 0.0;
    return report;
}

StateFunctional random_pure_state(const AlgebraDescriptor& algebra, Rng& rng) {
    if (is_flat(algebra)) return StateFunctional::pure(algebra, random_unit_vector(*algebra.flat_dimension(), rng));
    if (algebra.is_polynomial()) {
        std::vector<double> x(algebra.num_variables());
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        return StateFunctional::phase_point(algebra, std::move(x));
    }
    if (algebra.is_tensor()) {
        auto l = random_pure_state(algebra.left(), rng);
        return StateFunctional::product(l, random_pure_state(algebra.right(), rng));
    }
    throw Unsupported("random states on " + algebra.to_string());
}

StateFunctional random_state(const AlgebraDescriptor& algebra, Rng& rng) {
    if (is_flat(algebra)) {
        const int n = *algebra.flat_dimension();
        Matrix w(n, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) w(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
        Matrix rho = w * w.adjoint();
        rho /= rho.trace();
        return StateFunctional::density_matrix(algebra, hermitian_part(rho));
    }
    if (algebra.is_polynomial()) {
        std::vector<PhasePoint> points;
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            PhasePoint p{std::vector<double>(algebra.num_variables()), rng.uniform(0.1, 1.0)};
            for (auto& v : p.point) v = rng.uniform(-2.0, 2.0);
            total += p.weight;
            points.push_back(std::move(p));
        }
        for (auto& p : points) p.weight /= total;
        return StateFunctional::phase_ensemble(algebra, std::move(points));
    }
    if (algebra.is_tensor()) {
        auto l = random_state(algebra.left(), rng);
        return StateFunctional::product(l, random_state(algebra.right(), rng));
    }
    throw Unsupported("random states on " + algebra.to_string());
}

}  // namespace supmech
