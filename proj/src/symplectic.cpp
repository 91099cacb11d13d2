#include "supmech/symplectic.hpp"

#include <cmath>

#include "supmech/central.hpp"
#include "supmech/errors.hpp"

namespace supmech {

namespace {

Eigen::VectorXcd vectorize(const Matrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

}  // namespace

struct SymplecticStructure::Solver {
    Eigen::MatrixXcd op;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd;
    std::size_t rank = 0;
    std::vector<int> zero_key;
};

SymplecticStructure::SymplecticStructure(DifferentialForm form, std::string label, std::optional<double> hbar)
    : form_(std::move(form)), label_(std::move(label)), hbar_(hbar) {
    if (form_.degree() != 2) throw Error("a symplectic structure needs a 2-form");
    const auto& alg = form_.algebra();
    const int m = static_cast<int>(basis().size());
    const int d = matrix_part_dimension(alg);
    const Eigen::Index block = static_cast<Eigen::Index>(d) * d;
    auto solver = std::make_shared<Solver>();
    solver->zero_key.assign(central_variable_count(alg), 0);
    solver->op = Eigen::MatrixXcd::Zero(block * m, m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            if (k == j) continue;
            for (const auto& [key, mat] : split_central(form_.at({k, j}))) {
                if (key != solver->zero_key) {
                    if (mat.norm() == 0.0) continue;
                    throw Unsupported("Hamiltonian solver needs form entries constant in the central variables");
                }
                solver->op.block(j * block, k, block, 1) = vectorize(mat);
            }
        }
    }
    solver->svd.compute(solver->op, Eigen::ComputeThinU | Eigen::ComputeThinV);
    solver->svd.setThreshold(kRankThreshold);
    solver->rank = static_cast<std::size_t>(solver->svd.rank());
    solver_ = std::move(solver);
}

std::size_t SymplecticStructure::rank() const { return solver_->rank; }

std::vector<AlgebraElement> SymplecticStructure::hamiltonian_coefficients(const AlgebraElement& a) const {
    const auto& alg = algebra();
    if (a.algebra() != alg) throw AlgebraMismatch("element outside the structure's algebra");
    const std::size_t m = basis().size();
    if (solver_->rank < m) {
        throw NotUnique("symplectic solver is rank deficient (" + std::to_string(solver_->rank) + " < " +
                            std::to_string(m) + ")",
                        m - solver_->rank);
    }
    const int d = matrix_part_dimension(alg);
    const Eigen::Index block = static_cast<Eigen::Index>(d) * d;
    std::map<std::vector<int>, Eigen::VectorXcd> rhs;
    for (std::size_t j = 0; j < m; ++j) {
        for (const auto& [key, mat] : split_central(basis()[j].apply(a))) {
            auto it = rhs.find(key);
            if (it == rhs.end()) {
                it = rhs.emplace(key, Eigen::VectorXcd::Zero(block * static_cast<Eigen::Index>(m))).first;
            }
            it->second.segment(static_cast<Eigen::Index>(j) * block, block) = -vectorize(mat);
        }
    }
    std::vector<AlgebraElement> coeffs(m, AlgebraElement::zero(alg));
    double worst = 0.0;
    double scale = 1.0;
    for (const auto& [key, b] : rhs) {
        Eigen::VectorXcd y = solver_->svd.solve(b);
        worst = std::max(worst, (solver_->op * y - b).norm());
        scale = std::max(scale, b.norm());
        for (std::size_t k = 0; k < m; ++k) {
            const Complex v = y[static_cast<Eigen::Index>(k)];
            if (v != Complex{}) coeffs[k] += central_monomial(alg, key, v);
        }
    }
    if (worst > alg.tolerance() * scale) {
        throw NonDegeneracyFailure("no derivation in " + basis().signature() + " solves i_Y w = -dA", worst);
    }
    return coeffs;
}

Derivation SymplecticStructure::hamiltonian_derivation(const AlgebraElement& a) const {
    auto coeffs = hamiltonian_coefficients(a);
    if (basis().is_inner()) {
        AlgebraElement g = AlgebraElement::zero(algebra());
        bool scalar = true;
        for (std::size_t k = 0; k < coeffs.size() && scalar; ++k) {
            auto s = scalar_value(coeffs[k], 0.0);
            if (!s) {
                scalar = false;
                break;
            }
            if (*s != Complex{}) g += *s * *basis().inner_generator(k);
        }
        if (scalar) return Derivation::inner(g);
    }
    return basis().from_coefficients(coeffs);
}

AlgebraElement SymplecticStructure::poisson_bracket(const AlgebraElement& a, const AlgebraElement& b) const {
    return hamiltonian_derivation(a).apply(b);
}

DifferentialForm canonical_form(const AlgebraDescriptor& algebra) {
    if (!algebra.is_matrix()) throw NotSpecial(algebra.to_string() + " is not a special algebra");
    auto basis = DerivationBasis::gell_mann(algebra);
    DifferentialForm form(basis, 2);
    for (const auto& t : form.index_tuples()) {
        form.set(t, commutator(*basis.inner_generator(t[0]), *basis.inner_generator(t[1])));
    }
    return form;
}

SymplecticStructure quantum_form(const AlgebraDescriptor& algebra, double hbar) {
    if (!(hbar > 0.0)) throw Error("hbar must be positive");
    return SymplecticStructure(Complex(0.0, -hbar) * canonical_form(algebra), "quantum", hbar);
}

SymplecticStructure scaled_canonical_form(const AlgebraDescriptor& algebra, Complex b) {
    return SymplecticStructure(b * canonical_form(algebra), b == Complex(1.0) ? "canonical" : "scaled-canonical");
}

SymplecticStructure classical_form(const AlgebraDescriptor& algebra) {
    if (!algebra.is_polynomial()) throw AlgebraMismatch("the classical form needs a polynomial algebra");
    auto basis = DerivationBasis::coordinate(algebra);
    const int n = algebra.num_pairs();
    DifferentialForm form(basis, 2);
    // dp_j ∧ dq^j takes the value 1 on (∂/∂p_j, ∂/∂q^j)
    for (int j = 0; j < n; ++j) form.set({n + j, j}, AlgebraElement::unit(algebra));
    return SymplecticStructure(form, "classical");
}

Derivation hamiltonian_derivation(const SymplecticStructure& s, const AlgebraElement& a) {
    return s.hamiltonian_derivation(a);
}

AlgebraElement poisson_bracket(const SymplecticStructure& s, const AlgebraElement& a, const AlgebraElement& b) {
    return s.poisson_bracket(a, b);
}

SymplecticReport verify_symplectic(const SymplecticStructure& s) {
    SymplecticReport report;
    report.closed_residual = exterior_derivative(s.form()).max_norm();
    report.rank = s.rank();
    report.dimension = s.basis().size();
    report.nondegenerate = report.rank == report.dimension;
    for (const auto& a : algebra_basis(s.algebra(), 2)) {
        try {
            s.hamiltonian_coefficients(a);
        } catch (const NotUnique&) {
            ++report.unsolvable_samples;
        } catch (const NonDegeneracyFailure&) {
            ++report.unsolvable_samples;
        }
    }
    report.all_sampled_solvable = report.unsolvable_samples == 0;
    return report;
}

double canonical_transformation_defect(const AlgebraMorphism& phi, const SymplecticStructure& s) {
    return form_distance(pull_back(phi, s.form()), s.form());
}

bool is_canonical_transformation(const AlgebraMorphism& phi, const SymplecticStructure& s) {
    const double scale = std::max(1.0, s.form().max_norm());
    return canonical_transformation_defect(phi, s) <= s.algebra().tolerance() * scale;
}

AlgebraElement infinitesimal_canonical_change(const SymplecticStructure& s, const AlgebraElement& generator,
                                              const AlgebraElement& b, double epsilon) {
    if (!hermitian_part_check(generator)) throw Error("generator of a canonical change must be Hermitian");
    return epsilon * s.poisson_bracket(generator, b);
}

SymplecticStructure generalized_pair(const AlgebraDescriptor& algebra, const std::vector<AlgebraElement>& generators,
                                     Complex b) {
    auto basis = DerivationBasis::subalgebra(algebra, generators, "pair");
    DifferentialForm form(basis, 2);
    for (const auto& t : form.index_tuples()) {
        form.set(t, b * commutator(*basis.inner_generator(t[0]), *basis.inner_generator(t[1])));
    }
    return SymplecticStructure(form, "generalized-pair");
}

std::vector<Matrix> spin_matrices(double s, double hbar) {
    const double twice = 2.0 * s;
    if (twice < 1.0 || std::abs(twice - std::round(twice)) > 1e-12) throw Error("spin must be a positive half-integer");
    const int dim = static_cast<int>(std::round(twice)) + 1;
    Matrix sz = Matrix::Zero(dim, dim);
    Matrix sp = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double m = s - i;
        sz(i, i) = hbar * m;
        if (i > 0) sp(i - 1, i) = hbar * std::sqrt(s * (s + 1) - m * (m + 1));
    }
    Matrix sm = sp.adjoint();
    Matrix sx = 0.5 * (sp + sm);
    Matrix sy = Complex(0.0, -0.5) * (sp - sm);
    return {sx, sy, sz};
}

HamiltonianSystem::HamiltonianSystem(std::shared_ptr<const SymplecticStructure> structure, AlgebraElement hamiltonian)
    : structure_(std::move(structure)), hamiltonian_(std::move(hamiltonian)) {
    if (!structure_) throw Error("Hamiltonian system needs a structure");
    if (!hermitian_part_check(hamiltonian_)) throw Error("Hamiltonian is not Hermitian");
    flow_ = structure_->hamiltonian_derivation(hamiltonian_);
    description_ = structure_->label();
}

HamiltonianSystem::HamiltonianSystem(AlgebraElement hamiltonian, Derivation flow, std::string description)
    : hamiltonian_(std::move(hamiltonian)), flow_(std::move(flow)), description_(std::move(description)) {
    if (!hermitian_part_check(hamiltonian_)) throw Error("Hamiltonian is not Hermitian");
    if (flow_.algebra() != hamiltonian_.algebra()) throw AlgebraMismatch("flow and Hamiltonian algebras differ");
}

}  // namespace supmech
