#include "supmech/dynamics.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "supmech/errors.hpp"

namespace supmech {

namespace {

struct Grid {
    long steps = 0;
    double h = 0.0;
};

Grid make_grid(const EvolutionConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw Error("evolution step dt must be positive");
    if (!(cfg.t_end >= 0.0)) throw Error("evolution end time must be nonnegative");
    if (cfg.record_every < 1 || cfg.check_interval < 1) throw Error("record_every and check_interval must be positive");
    Grid g;
    if (cfg.t_end == 0.0) return g;
    g.steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
    g.h = cfg.t_end / static_cast<double>(g.steps);
    return g;
}

bool record_step(long k, const Grid& g, const EvolutionConfig& cfg) {
    return k % cfg.record_every == 0 || k == g.steps;
}

/// The degree-4 Taylor polynomial of exp(hL), i.e. one classical RK4 step of v' = L v.
Matrix rk4_propagator(const Matrix& l, double h) {
    const Matrix hl = h * l;
    Matrix p = Matrix::Identity(l.rows(), l.cols());
    Matrix term = p;
    for (int k = 1; k <= 4; ++k) {
        term = term * hl / static_cast<double>(k);
        p += term;
    }
    return p;
}

void check_local_error(double estimate, double bound, double t) {
    if (estimate > bound) {
        throw StepTooLarge("RK4 local error estimate " + std::to_string(estimate) + " exceeds bound " +
                           std::to_string(bound) + " at t = " + std::to_string(t),
                           estimate);
    }
}

/// Integrates v' = L v on the grid, returning the recorded samples.
TimeSeries<Eigen::VectorXcd> integrate_linear(const Matrix& l, const Eigen::VectorXcd& v0, const EvolutionConfig& cfg,
                                             bool exact) {
    const Grid g = make_grid(cfg);
    TimeSeries<Eigen::VectorXcd> out;
    out.times.push_back(0.0);
    out.values.push_back(v0);
    if (g.steps == 0) return out;
    const Matrix step = exact ? Matrix((g.h * l).exp()) : rk4_propagator(l, g.h);
    Matrix half;
    if (!exact) {
        const Matrix p = rk4_propagator(l, 0.5 * g.h);
        half = p * p;
    }
    Eigen::VectorXcd v = v0;
    for (long k = 1; k <= g.steps; ++k) {
        if (!exact && (k - 1) % cfg.check_interval == 0) {
            const double est = (step * v - half * v).norm() * 16.0 / 15.0 / std::max(1.0, v.norm());
            check_local_error(est, cfg.error_bound, (k - 1) * g.h);
        }
        v = step * v;
        if (record_step(k, g, cfg)) {
            out.times.push_back(k * g.h);
            out.values.push_back(v);
        }
    }
    return out;
}

Eigen::VectorXcd to_vector(const Matrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

Matrix to_matrix(const Eigen::VectorXcd& v, int n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

/// The anti-Hermitian generator G of an inner flow D_G, if there is one.
std::optional<Matrix> conjugation_generator(const Derivation& flow) {
    if (flow.kind() != Derivation::Kind::Inner) return std::nullopt;
    const Matrix g = flatten(flow.generator());
    if ((g + g.adjoint()).norm() > 1e-9 * std::max(1.0, g.norm())) return std::nullopt;
    return g;
}

/// e^{tG} for anti-Hermitian G via the eigendecomposition of the Hermitian matrix iG.
class ConjugationPropagator {
   public:
    explicit ConjugationPropagator(const Matrix& g) : es_(Matrix(Complex(0, 1) * g)) {}
    Matrix at(double t) const {
        const Eigen::VectorXcd phases = (-Complex(0, 1) * t * es_.eigenvalues().cast<Complex>()).array().exp();
        return es_.eigenvectors() * phases.asDiagonal() * es_.eigenvectors().adjoint();
    }

   private:
    Eigen::SelfAdjointEigenSolver<Matrix> es_;
};

std::vector<double> grid_times(const EvolutionConfig& cfg) {
    const Grid g = make_grid(cfg);
    std::vector<double> times{0.0};
    for (long k = 1; k <= g.steps; ++k) {
        if (record_step(k, g, cfg)) times.push_back(k * g.h);
    }
    return times;
}

/// Hamilton's vector field x ↦ ({H, ξ^i}(x))_i.
class PhaseField {
   public:
    explicit PhaseField(const HamiltonianSystem& sys) {
        const auto& alg = sys.algebra();
        for (int i = 0; i < alg.num_variables(); ++i) components_.push_back(sys.flow().apply(coordinate(alg, i)).polynomial());
    }
    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        Eigen::VectorXd out(x.size());
        std::span<const double> pt(x.data(), static_cast<std::size_t>(x.size()));
        for (std::size_t i = 0; i < components_.size(); ++i) out(static_cast<Eigen::Index>(i)) = components_[i].evaluate(pt).real();
        return out;
    }
    const std::vector<Polynomial>& components() const { return components_; }

   private:
    std::vector<Polynomial> components_;
};

Eigen::VectorXd rk4_step(const PhaseField& f, const Eigen::VectorXd& x, double h) {
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates several phase points together; the result is indexed [sample][point].
TimeSeries<std::vector<Eigen::VectorXd>> integrate_points(const HamiltonianSystem& sys,
                                                         std::vector<Eigen::VectorXd> xs, const EvolutionConfig& cfg) {
    if (!sys.algebra().is_polynomial()) throw Unsupported("phase-point flow needs a polynomial algebra");
    if (cfg.method == EvolutionMethod::ExactConjugation) throw Unsupported("exact conjugation needs a matrix algebra");
    const Grid g = make_grid(cfg);
    const PhaseField field(sys);
    TimeSeries<std::vector<Eigen::VectorXd>> out;
    out.times.push_back(0.0);
    out.values.push_back(xs);
    for (long k = 1; k <= g.steps; ++k) {
        const bool check = (k - 1) % cfg.check_interval == 0;
        for (auto& x : xs) {
            if (check) {
                const Eigen::VectorXd full = rk4_step(field, x, g.h);
                const Eigen::VectorXd halves = rk4_step(field, rk4_step(field, x, 0.5 * g.h), 0.5 * g.h);
                check_local_error((full - halves).norm() * 16.0 / 15.0 / std::max(1.0, x.norm()), cfg.error_bound,
                                  (k - 1) * g.h);
                x = full;
            } else {
                x = rk4_step(field, x, g.h);
            }
        }
        if (record_step(k, g, cfg)) {
            out.times.push_back(k * g.h);
            out.values.push_back(xs);
        }
    }
    return out;
}

Eigen::VectorXd to_eigen(const std::vector<double>& x) { return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()); }

}  // namespace

Matrix flow_superoperator(const Derivation& flow) {
    const auto& alg = flow.algebra();
    const auto dim = alg.flat_dimension();
    if (!dim) throw Unsupported("flow superoperator needs a matrix-like algebra, got " + alg.to_string());
    const int n = *dim;
    Matrix l(n * n, n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = 1.0;
            l.col(i + j * n) = to_vector(flatten(flow.apply(unflatten(alg, e))));
        }
    }
    return l;
}

ObservableSeries evolve_observable(const HamiltonianSystem& sys, const AlgebraElement& a0, const EvolutionConfig& cfg) {
    const auto& alg = sys.algebra();
    if (a0.algebra() != alg) throw AlgebraMismatch("observable and Hamiltonian algebras differ");
    ObservableSeries out;
    if (const auto dim = alg.flat_dimension()) {
        const int n = *dim;
        if (cfg.method == EvolutionMethod::ExactConjugation) {
            if (auto g = conjugation_generator(sys.flow())) {
                const ConjugationPropagator u(*g);
                const Matrix a = flatten(a0);
                for (double t : grid_times(cfg)) {
                    const Matrix ut = u.at(t);
                    out.times.push_back(t);
                    out.values.push_back(unflatten(alg, ut * a * ut.adjoint()));
                }
                return out;
            }
        }
        auto series = integrate_linear(flow_superoperator(sys.flow()), to_vector(flatten(a0)), cfg,
                                       cfg.method == EvolutionMethod::ExactConjugation);
        out.times = std::move(series.times);
        for (const auto& v : series.values) out.values.push_back(unflatten(alg, to_matrix(v, n)));
        return out;
    }
    if (alg.is_polynomial()) {
        if (sys.hamiltonian().polynomial().degree() > 2) {
            throw DegreeBoundExceeded("observable flow of a Hamiltonian of degree " +
                                      std::to_string(sys.hamiltonian().polynomial().degree()) +
                                      " is not polynomial; evolve states instead");
        }
        // The flow is affine; track the images of the origin and the unit vectors.
        const int d = alg.num_variables();
        std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Zero(d)};
        for (int i = 0; i < d; ++i) xs.push_back(Eigen::VectorXd::Unit(d, i));
        auto series = integrate_points(sys, std::move(xs), cfg);
        out.times = std::move(series.times);
        for (const auto& pts : series.values) {
            Eigen::MatrixXd m(d, d);
            for (int i = 0; i < d; ++i) m.col(i) = pts[i + 1] - pts[0];
            out.values.emplace_back(alg, a0.polynomial().compose_affine(m, pts[0]));
        }
        return out;
    }
    throw Unsupported("observable evolution on " + alg.to_string());
}

StateSeries evolve_state(const HamiltonianSystem& sys, const StateFunctional& phi0, const EvolutionConfig& cfg) {
    const auto& alg = sys.algebra();
    if (phi0.algebra() != alg) throw AlgebraMismatch("state and Hamiltonian algebras differ");
    StateSeries out;
    if (const auto dim = alg.flat_dimension()) {
        const int n = *dim;
        const Matrix rho0 = phi0.as_density().density();
        if (cfg.method == EvolutionMethod::ExactConjugation) {
            if (auto g = conjugation_generator(sys.flow())) {
                const ConjugationPropagator u(*g);
                for (double t : grid_times(cfg)) {
                    const Matrix ut = u.at(t);
                    out.times.push_back(t);
                    out.values.push_back(StateFunctional::density_matrix(alg, ut.adjoint() * rho0 * ut));
                }
                return out;
            }
        }
        // Tr(ρ(t) A) = Tr(ρ A(t)) makes the state generator the transpose of the
        // observable one under the pairing vec(ρᵀ)·vec(A).
        const Matrix l = flow_superoperator(sys.flow());
        Matrix ls(l.rows(), l.cols());
        auto transpose_index = [n](Eigen::Index a) { return (a % n) * n + a / n; };
        for (Eigen::Index a = 0; a < l.rows(); ++a) {
            for (Eigen::Index b = 0; b < l.cols(); ++b) ls(a, b) = l(transpose_index(b), transpose_index(a));
        }
        auto series = integrate_linear(ls, to_vector(rho0), cfg, cfg.method == EvolutionMethod::ExactConjugation);
        out.times = std::move(series.times);
        for (const auto& v : series.values) out.values.push_back(StateFunctional::density_matrix(alg, to_matrix(v, n)));
        return out;
    }
    if (alg.is_polynomial()) {
        std::vector<Eigen::VectorXd> xs;
        for (const auto& p : phi0.points()) xs.push_back(to_eigen(p.point));
        auto series = integrate_points(sys, std::move(xs), cfg);
        out.times = std::move(series.times);
        for (const auto& pts : series.values) {
            std::vector<PhasePoint> points;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                points.push_back(PhasePoint{std::vector<double>(pts[k].data(), pts[k].data() + pts[k].size()),
                                            phi0.points()[k].weight});
            }
            out.values.push_back(StateFunctional::phase_ensemble(alg, std::move(points)));
        }
        return out;
    }
    throw Unsupported("state evolution on " + alg.to_string());
}

TimeSeries<std::vector<double>> evolve_point(const HamiltonianSystem& sys, const std::vector<double>& x0,
                                             const EvolutionConfig& cfg) {
    auto series = integrate_points(sys, {to_eigen(x0)}, cfg);
    TimeSeries<std::vector<double>> out;
    out.times = std::move(series.times);
    for (const auto& pts : series.values) out.values.emplace_back(pts[0].data(), pts[0].data() + pts[0].size());
    return out;
}

HamiltonianSystem coupled_system(const HamiltonianSystem& first, const HamiltonianSystem& second,
                                 const std::vector<InteractionTerm>& interaction, std::uint64_t seed) {
    if (!first.structure() || !second.structure()) throw Unsupported("coupling needs systems built from structures");
    const auto s1 = first.structure();
    const auto s2 = second.structure();
    const auto world = classify_worlds(*s1, *s2, seed);
    if (world.verdict == WorldVerdict::Inconsistent) {
        throw ForbiddenCoupling("systems on " + first.algebra().to_string() + " and " + second.algebra().to_string() +
                                    " cannot be coupled (" + world.reason + ")",
                                to_string(world.verdict) + ":" + world.reason);
    }
    const auto& a1 = first.algebra();
    const auto& a2 = second.algebra();
    auto h = tensor_element(first.hamiltonian(), AlgebraElement::unit(a2)) +
             tensor_element(AlgebraElement::unit(a1), second.hamiltonian());
    for (const auto& term : interaction) {
        if (term.left.algebra() != a1 || term.right.algebra() != a2) {
            throw AlgebraMismatch("interaction term outside " + a1.to_string() + " ⊗ " + a2.to_string());
        }
        if (!hermitian_part_check(term.left) || !hermitian_part_check(term.right)) {
            throw Error("interaction factors must be Hermitian");
        }
        h += tensor_element(term.left, term.right);
    }
    std::vector<CandidateOperator> parts;
    for (const auto& t : h.terms()) {
        parts.push_back(product_candidate(s1->hamiltonian_derivation(t.left), t.left,
                                          s2->hamiltonian_derivation(t.right), t.right, world.lambda));
    }
    const auto alg = h.algebra();
    LinearMap map = [parts, alg](const AlgebraElement& a) {
        auto out = AlgebraElement::zero(alg);
        for (const auto& p : parts) out += p.apply(a);
        return out;
    };
    auto flow = Derivation::function(alg, std::move(map), "coupled flow");
    return HamiltonianSystem(h, flow,
                             "coupled " + first.description() + " ⊗ " + second.description() + " (" +
                                 to_string(world.verdict) + ")");
}

}  // namespace supmech
