#include "supmech/algebra.hpp"

#include <map>
#include <sstream>

#include "supmech/errors.hpp"

namespace supmech {

// ---------------------------------------------------------------- descriptor

AlgebraDescriptor AlgebraDescriptor::matrix(int n, double tolerance) {
    if (n < 1) throw Error("Matrix(n) requires n >= 1");
    if (!(tolerance > 0.0)) throw Error("equality tolerance must be positive");
    return AlgebraDescriptor(Kind::Matrix, n, tolerance);
}

AlgebraDescriptor AlgebraDescriptor::polynomial(int num_pairs, double tolerance) {
    if (num_pairs < 1) throw Error("Polynomial(n) requires n >= 1");
    if (!(tolerance > 0.0)) throw Error("equality tolerance must be positive");
    return AlgebraDescriptor(Kind::Polynomial, num_pairs, tolerance);
}

AlgebraDescriptor AlgebraDescriptor::tensor(const AlgebraDescriptor& left, const AlgebraDescriptor& right) {
    AlgebraDescriptor d(Kind::Tensor, 0, std::min(left.tolerance(), right.tolerance()));
    d.left_ = std::make_shared<const AlgebraDescriptor>(left);
    d.right_ = std::make_shared<const AlgebraDescriptor>(right);
    return d;
}

int AlgebraDescriptor::dimension() const {
    if (kind_ != Kind::Matrix) throw AlgebraMismatch("dimension() requires a matrix algebra");
    return n_;
}

int AlgebraDescriptor::num_pairs() const {
    if (kind_ != Kind::Polynomial) throw AlgebraMismatch("num_pairs() requires a polynomial algebra");
    return n_;
}

const AlgebraDescriptor& AlgebraDescriptor::left() const {
    if (kind_ != Kind::Tensor) throw AlgebraMismatch("left() requires a tensor algebra");
    return *left_;
}

const AlgebraDescriptor& AlgebraDescriptor::right() const {
    if (kind_ != Kind::Tensor) throw AlgebraMismatch("right() requires a tensor algebra");
    return *right_;
}

AlgebraDescriptor AlgebraDescriptor::with_tolerance(double tolerance) const {
    if (!(tolerance > 0.0)) throw Error("equality tolerance must be positive");
    AlgebraDescriptor d = *this;
    d.tolerance_ = tolerance;
    if (kind_ == Kind::Tensor) {
        d.left_ = std::make_shared<const AlgebraDescriptor>(left_->with_tolerance(tolerance));
        d.right_ = std::make_shared<const AlgebraDescriptor>(right_->with_tolerance(tolerance));
    }
    return d;
}

bool AlgebraDescriptor::is_commutative() const {
    switch (kind_) {
        case Kind::Matrix:
            return n_ == 1;
        case Kind::Polynomial:
            return true;
        case Kind::Tensor:
            return left_->is_commutative() && right_->is_commutative();
    }
    return false;
}

std::optional<int> AlgebraDescriptor::flat_dimension() const {
    switch (kind_) {
        case Kind::Matrix:
            return n_;
        case Kind::Polynomial:
            return std::nullopt;
        case Kind::Tensor: {
            auto l = left_->flat_dimension();
            auto r = right_->flat_dimension();
            if (l && r) return *l * *r;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<int> AlgebraDescriptor::vector_dimension() const {
    auto f = flat_dimension();
    if (f) return *f * *f;
    return std::nullopt;
}

std::string AlgebraDescriptor::to_string() const {
    switch (kind_) {
        case Kind::Matrix:
            return "Matrix(" + std::to_string(n_) + ")";
        case Kind::Polynomial:
            return "Polynomial(" + std::to_string(n_) + ")";
        case Kind::Tensor:
            return "Tensor(" + left_->to_string() + ", " + right_->to_string() + ")";
    }
    return "?";
}

bool operator==(const AlgebraDescriptor& a, const AlgebraDescriptor& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == AlgebraDescriptor::Kind::Tensor) return *a.left_ == *b.left_ && *a.right_ == *b.right_;
    return a.n_ == b.n_;
}

std::string to_string(CenterKind kind) {
    switch (kind) {
        case CenterKind::ScalarsOnly:
            return "ScalarsOnly";
        case CenterKind::WholeAlgebra:
            return "WholeAlgebra";
        case CenterKind::LeftFactorCentral:
            return "LeftFactorCentral";
        case CenterKind::RightFactorCentral:
            return "RightFactorCentral";
        case CenterKind::Mixed:
            return "Mixed";
    }
    return "?";
}

// ------------------------------------------------------------------- helpers

namespace {

struct BasisComponent {
    std::vector<int> key;
    AlgebraElement element;
    Complex coefficient;
};

Matrix matrix_unit(int n, int i, int j) {
    Matrix m = Matrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

std::vector<BasisComponent> decompose(const AlgebraElement& a);

AlgebraElement::TensorSum canonicalize(const AlgebraDescriptor& algebra, const AlgebraElement::TensorSum& terms) {
    std::map<std::vector<int>, std::pair<AlgebraElement, AlgebraElement>> merged;
    for (const auto& term : terms) {
        if (term.left.algebra() != algebra.left() || term.right.algebra() != algebra.right()) {
            throw AlgebraMismatch("tensor term does not belong to " + algebra.to_string());
        }
        if (term.right.is_exactly_zero()) continue;
        for (auto& component : decompose(term.left)) {
            AlgebraElement contribution = term.right;
            if (component.coefficient != Complex(1.0)) contribution *= component.coefficient;
            auto it = merged.find(component.key);
            if (it == merged.end()) {
                merged.emplace(std::move(component.key),
                               std::make_pair(std::move(component.element), std::move(contribution)));
            } else {
                it->second.second += contribution;
            }
        }
    }
    AlgebraElement::TensorSum out;
    out.reserve(merged.size());
    for (auto& [key, pair] : merged) {
        if (pair.second.is_exactly_zero()) continue;
        out.push_back(TensorTerm{std::move(pair.first), std::move(pair.second)});
    }
    return out;
}

std::vector<BasisComponent> decompose(const AlgebraElement& a) {
    std::vector<BasisComponent> out;
    const auto& algebra = a.algebra();
    if (a.is_matrix()) {
        const Matrix& m = a.matrix();
        const int n = static_cast<int>(m.rows());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (m(i, j) == Complex{}) continue;
                out.push_back({{i, j}, AlgebraElement(algebra, matrix_unit(n, i, j)), m(i, j)});
            }
        }
    } else if (a.is_polynomial()) {
        const int nv = a.polynomial().num_variables();
        for (const auto& [e, c] : a.polynomial().terms()) {
            out.push_back({e, AlgebraElement(algebra, Polynomial::monomial(nv, e)), c});
        }
    } else {
        for (const auto& term : a.terms()) {
            for (auto& inner : decompose(term.right)) {
                // left factors are already basis elements, so their key is unique
                auto left_parts = decompose(term.left);
                const auto& lp = left_parts.front();
                std::vector<int> key;
                key.push_back(static_cast<int>(lp.key.size()));
                key.insert(key.end(), lp.key.begin(), lp.key.end());
                key.insert(key.end(), inner.key.begin(), inner.key.end());
                AlgebraElement::TensorSum single{TensorTerm{term.left, inner.element}};
                out.push_back({std::move(key), AlgebraElement(algebra, std::move(single)), inner.coefficient});
            }
        }
    }
    return out;
}

double flat_squared_norm(const AlgebraElement& a) {
    if (a.is_matrix()) return a.matrix().squaredNorm();
    if (a.is_polynomial()) {
        double s = 0.0;
        for (const auto& [e, c] : a.polynomial().terms()) s += std::norm(c);
        return s;
    }
    double s = 0.0;
    for (const auto& term : a.terms()) s += flat_squared_norm(term.right);
    return s;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

void require_same(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.algebra() != b.algebra()) {
        throw AlgebraMismatch("algebra mismatch: " + a.algebra().to_string() + " vs " + b.algebra().to_string());
    }
}

}  // namespace

// ------------------------------------------------------------------- element

AlgebraElement::AlgebraElement() : algebra_(AlgebraDescriptor::matrix(1)), payload_(Matrix::Zero(1, 1)) {}

AlgebraElement::AlgebraElement(AlgebraDescriptor algebra, Matrix value)
    : algebra_(std::move(algebra)), payload_(std::move(value)) {
    if (!algebra_.is_matrix()) throw AlgebraMismatch("matrix payload for " + algebra_.to_string());
    const auto& m = std::get<Matrix>(payload_);
    if (m.rows() != algebra_.dimension() || m.cols() != algebra_.dimension()) {
        throw AlgebraMismatch("matrix payload has wrong dimensions for " + algebra_.to_string());
    }
}

AlgebraElement::AlgebraElement(AlgebraDescriptor algebra, Polynomial value)
    : algebra_(std::move(algebra)), payload_(std::move(value)) {
    if (!algebra_.is_polynomial()) throw AlgebraMismatch("polynomial payload for " + algebra_.to_string());
    if (std::get<Polynomial>(payload_).num_variables() != algebra_.num_variables()) {
        throw AlgebraMismatch("polynomial payload has wrong variable count for " + algebra_.to_string());
    }
}

AlgebraElement::AlgebraElement(AlgebraDescriptor algebra, TensorSum terms) : algebra_(std::move(algebra)) {
    if (!algebra_.is_tensor()) throw AlgebraMismatch("tensor payload for " + algebra_.to_string());
    payload_ = canonicalize(algebra_, terms);
}

AlgebraElement AlgebraElement::zero(const AlgebraDescriptor& algebra) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return AlgebraElement(algebra, Matrix(Matrix::Zero(algebra.dimension(), algebra.dimension())));
        case AlgebraDescriptor::Kind::Polynomial:
            return AlgebraElement(algebra, Polynomial(algebra.num_variables()));
        case AlgebraDescriptor::Kind::Tensor:
            return AlgebraElement(algebra, TensorSum{});
    }
    throw Error("unknown algebra kind");
}

AlgebraElement AlgebraElement::unit(const AlgebraDescriptor& algebra) { return scalar(algebra, 1.0); }

AlgebraElement AlgebraElement::scalar(const AlgebraDescriptor& algebra, Complex value) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return AlgebraElement(algebra,
                                  Matrix(value * Matrix::Identity(algebra.dimension(), algebra.dimension())));
        case AlgebraDescriptor::Kind::Polynomial:
            return AlgebraElement(algebra, Polynomial::constant(algebra.num_variables(), value));
        case AlgebraDescriptor::Kind::Tensor:
            return AlgebraElement(algebra, TensorSum{TensorTerm{unit(algebra.left()), scalar(algebra.right(), value)}});
    }
    throw Error("unknown algebra kind");
}

const Matrix& AlgebraElement::matrix() const {
    if (!is_matrix()) throw AlgebraMismatch("element is not a matrix: " + algebra_.to_string());
    return std::get<Matrix>(payload_);
}

const Polynomial& AlgebraElement::polynomial() const {
    if (!is_polynomial()) throw AlgebraMismatch("element is not a polynomial: " + algebra_.to_string());
    return std::get<Polynomial>(payload_);
}

const AlgebraElement::TensorSum& AlgebraElement::terms() const {
    if (!is_tensor()) throw AlgebraMismatch("element is not a tensor: " + algebra_.to_string());
    return std::get<TensorSum>(payload_);
}

double AlgebraElement::norm() const {
    if (is_matrix()) return matrix().norm();
    if (is_polynomial()) return polynomial().max_abs_coefficient();
    return std::sqrt(flat_squared_norm(*this));
}

bool AlgebraElement::is_exactly_zero() const {
    if (is_matrix()) return (matrix().array() == Complex{}).all();
    if (is_polynomial()) return polynomial().is_zero();
    return terms().empty();
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
    require_same(*this, other);
    if (is_matrix()) {
        std::get<Matrix>(payload_) += other.matrix();
    } else if (is_polynomial()) {
        std::get<Polynomial>(payload_) += other.polynomial();
    } else {
        TensorSum sum = terms();
        sum.insert(sum.end(), other.terms().begin(), other.terms().end());
        payload_ = canonicalize(algebra_, sum);
    }
    return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) { return *this += (-1.0) * other; }

AlgebraElement& AlgebraElement::operator*=(Complex s) {
    if (is_matrix()) {
        std::get<Matrix>(payload_) *= s;
    } else if (is_polynomial()) {
        std::get<Polynomial>(payload_) *= s;
    } else {
        auto& sum = std::get<TensorSum>(payload_);
        if (s == Complex{}) {
            sum.clear();
        } else {
            for (auto& term : sum) term.right *= s;
        }
    }
    return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a, b);
    if (a.is_matrix()) return AlgebraElement(a.algebra(), Matrix(a.matrix() * b.matrix()));
    if (a.is_polynomial()) return AlgebraElement(a.algebra(), a.polynomial() * b.polynomial());
    AlgebraElement::TensorSum product;
    product.reserve(a.terms().size() * b.terms().size());
    for (const auto& x : a.terms()) {
        for (const auto& y : b.terms()) product.push_back(TensorTerm{x.left * y.left, x.right * y.right});
    }
    return AlgebraElement(a.algebra(), std::move(product));
}

std::string AlgebraElement::to_string() const {
    std::ostringstream os;
    if (is_matrix()) {
        os << "[";
        const Matrix& m = matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i) os << "; ";
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (j) os << ", ";
                os << m(i, j).real() << (m(i, j).imag() < 0 ? "-" : "+") << std::abs(m(i, j).imag()) << "i";
            }
        }
        os << "]";
    } else if (is_polynomial()) {
        os << polynomial().to_string();
    } else {
        bool first = true;
        for (const auto& term : terms()) {
            if (!first) os << " + ";
            first = false;
            os << "(" << term.left.to_string() << ")⊗(" << term.right.to_string() << ")";
        }
        if (first) os << "0";
    }
    return os.str();
}

// ---------------------------------------------------------------- operations

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) { return a + b; }
AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) { return a * b; }
AlgebraElement scale(Complex z, const AlgebraElement& a) { return z * a; }

AlgebraElement star(const AlgebraElement& a) {
    if (a.is_matrix()) return AlgebraElement(a.algebra(), Matrix(a.matrix().adjoint()));
    if (a.is_polynomial()) return AlgebraElement(a.algebra(), a.polynomial().conj());
    AlgebraElement::TensorSum out;
    out.reserve(a.terms().size());
    for (const auto& term : a.terms()) out.push_back(TensorTerm{star(term.left), star(term.right)});
    return AlgebraElement(a.algebra(), std::move(out));
}

AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a, b);
    if (a.is_polynomial()) return AlgebraElement::zero(a.algebra());
    return a * b - b * a;
}

bool approx_equal(const AlgebraElement& a, const AlgebraElement& b) {
    return approx_equal(a, b, a.algebra().tolerance());
}

bool approx_equal(const AlgebraElement& a, const AlgebraElement& b, double tolerance) {
    require_same(a, b);
    return (a - b).norm() <= tolerance;
}

bool is_central(const AlgebraElement& a) {
    const double threshold = a.algebra().tolerance() * std::max(1.0, a.norm());
    for (const auto& g : algebra_generators(a.algebra())) {
        if (commutator(a, g).norm() > threshold) return false;
    }
    return true;
}

CenterKind center_description(const AlgebraDescriptor& algebra) {
    if (algebra.is_commutative()) return CenterKind::WholeAlgebra;
    if (algebra.is_matrix()) return CenterKind::ScalarsOnly;
    const bool left_comm = algebra.left().is_commutative();
    const bool right_comm = algebra.right().is_commutative();
    const auto l = center_description(algebra.left());
    const auto r = center_description(algebra.right());
    if (left_comm && r == CenterKind::ScalarsOnly) return CenterKind::LeftFactorCentral;
    if (right_comm && l == CenterKind::ScalarsOnly) return CenterKind::RightFactorCentral;
    if (l == CenterKind::ScalarsOnly && r == CenterKind::ScalarsOnly) return CenterKind::ScalarsOnly;
    return CenterKind::Mixed;
}

bool hermitian_part_check(const AlgebraElement& a) {
    return (a - star(a)).norm() <= a.algebra().tolerance() * std::max(1.0, a.norm());
}

AlgebraElement tensor_element(const AlgebraElement& a, const AlgebraElement& b) {
    auto algebra = AlgebraDescriptor::tensor(a.algebra(), b.algebra());
    return AlgebraElement(algebra, AlgebraElement::TensorSum{TensorTerm{a, b}});
}

AlgebraElement embed_left(const AlgebraElement& a, const AlgebraDescriptor& right) {
    return tensor_element(a, AlgebraElement::unit(right));
}

AlgebraElement embed_right(const AlgebraDescriptor& left, const AlgebraElement& b) {
    return tensor_element(AlgebraElement::unit(left), b);
}

Matrix flatten(const AlgebraElement& a) {
    if (a.is_matrix()) return a.matrix();
    auto dim = a.algebra().flat_dimension();
    if (!dim) throw AlgebraMismatch("cannot flatten " + a.algebra().to_string());
    Matrix out = Matrix::Zero(*dim, *dim);
    for (const auto& term : a.terms()) out += kronecker(flatten(term.left), flatten(term.right));
    return out;
}

AlgebraElement unflatten(const AlgebraDescriptor& algebra, const Matrix& m) {
    auto dim = algebra.flat_dimension();
    if (!dim) throw AlgebraMismatch("cannot unflatten into " + algebra.to_string());
    if (m.rows() != *dim || m.cols() != *dim) throw AlgebraMismatch("matrix has wrong size for " + algebra.to_string());
    if (algebra.is_matrix()) return AlgebraElement(algebra, m);
    const int nl = *algebra.left().flat_dimension();
    const int nr = *algebra.right().flat_dimension();
    AlgebraElement::TensorSum terms;
    for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
            Matrix block = m.block(i * nr, j * nr, nr, nr);
            if ((block.array() == Complex{}).all()) continue;
            terms.push_back(TensorTerm{unflatten(algebra.left(), matrix_unit(nl, i, j)),
                                       unflatten(algebra.right(), block)});
        }
    }
    return AlgebraElement(algebra, std::move(terms));
}

Eigen::VectorXcd coordinates(const AlgebraElement& a) {
    Matrix m = flatten(a);
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

std::vector<AlgebraElement> algebra_basis(const AlgebraDescriptor& algebra, int max_degree) {
    std::vector<AlgebraElement> out;
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix: {
            const int n = algebra.dimension();
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) out.emplace_back(algebra, matrix_unit(n, i, j));
            }
            break;
        }
        case AlgebraDescriptor::Kind::Polynomial: {
            const int nv = algebra.num_variables();
            for (auto& e : monomials_up_to(nv, max_degree)) out.emplace_back(algebra, Polynomial::monomial(nv, e));
            break;
        }
        case AlgebraDescriptor::Kind::Tensor: {
            auto left = algebra_basis(algebra.left(), max_degree);
            auto right = algebra_basis(algebra.right(), max_degree);
            for (const auto& l : left) {
                for (const auto& r : right) out.push_back(tensor_element(l, r));
            }
            break;
        }
    }
    return out;
}

std::vector<AlgebraElement> algebra_generators(const AlgebraDescriptor& algebra) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return algebra_basis(algebra);
        case AlgebraDescriptor::Kind::Polynomial: {
            std::vector<AlgebraElement> out;
            for (int a = 0; a < algebra.num_variables(); ++a) out.push_back(coordinate(algebra, a));
            return out;
        }
        case AlgebraDescriptor::Kind::Tensor: {
            std::vector<AlgebraElement> out;
            for (const auto& g : algebra_generators(algebra.left())) out.push_back(embed_left(g, algebra.right()));
            for (const auto& g : algebra_generators(algebra.right())) out.push_back(embed_right(algebra.left(), g));
            return out;
        }
    }
    return {};
}

AlgebraElement coordinate(const AlgebraDescriptor& algebra, int index) {
    if (!algebra.is_polynomial()) throw AlgebraMismatch("coordinate functions need a polynomial algebra");
    return AlgebraElement(algebra, Polynomial::variable(algebra.num_variables(), index));
}

AlgebraElement random_element(const AlgebraDescriptor& algebra, Rng& rng, int max_degree) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix: {
            const int n = algebra.dimension();
            Matrix m(n, n);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    double re = rng.uniform(-1.0, 1.0);
                    double im = rng.uniform(-1.0, 1.0);
                    m(i, j) = Complex(re, im);
                }
            }
            return AlgebraElement(algebra, std::move(m));
        }
        case AlgebraDescriptor::Kind::Polynomial: {
            const int nv = algebra.num_variables();
            Polynomial p(nv);
            for (auto& e : monomials_up_to(nv, max_degree)) {
                double re = rng.uniform(-1.0, 1.0);
                double im = rng.uniform(-1.0, 1.0);
                p.add_term(e, Complex(re, im));
            }
            return AlgebraElement(algebra, std::move(p));
        }
        case AlgebraDescriptor::Kind::Tensor: {
            AlgebraElement out = AlgebraElement::zero(algebra);
            for (int k = 0; k < 2; ++k) {
                auto l = random_element(algebra.left(), rng, max_degree);
                auto r = random_element(algebra.right(), rng, max_degree);
                out += tensor_element(l, r);
            }
            return out;
        }
    }
    throw Error("unknown algebra kind");
}

AlgebraElement random_hermitian(const AlgebraDescriptor& algebra, Rng& rng, int max_degree) {
    auto a = random_element(algebra, rng, max_degree);
    return 0.5 * (a + star(a));
}

AlgebraElement pauli_x(double tolerance) {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return AlgebraElement(AlgebraDescriptor::matrix(2, tolerance), m);
}

AlgebraElement pauli_y(double tolerance) {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return AlgebraElement(AlgebraDescriptor::matrix(2, tolerance), m);
}

AlgebraElement pauli_z(double tolerance) {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return AlgebraElement(AlgebraDescriptor::matrix(2, tolerance), m);
}

}  // namespace supmech
