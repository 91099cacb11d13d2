#include "supmech/central.hpp"

#include "supmech/errors.hpp"

namespace supmech {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

void accumulate(CentralSplit& into, const std::vector<int>& key, const Matrix& m) {
    auto it = into.find(key);
    if (it == into.end()) {
        into.emplace(key, m);
    } else {
        it->second += m;
    }
}

}  // namespace

int central_variable_count(const AlgebraDescriptor& algebra) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return 0;
        case AlgebraDescriptor::Kind::Polynomial:
            return algebra.num_variables();
        case AlgebraDescriptor::Kind::Tensor:
            return central_variable_count(algebra.left()) + central_variable_count(algebra.right());
    }
    return 0;
}

int matrix_part_dimension(const AlgebraDescriptor& algebra) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix:
            return algebra.dimension();
        case AlgebraDescriptor::Kind::Polynomial:
            return 1;
        case AlgebraDescriptor::Kind::Tensor:
            return matrix_part_dimension(algebra.left()) * matrix_part_dimension(algebra.right());
    }
    return 1;
}

CentralSplit split_central(const AlgebraElement& a) {
    CentralSplit out;
    if (a.is_matrix()) {
        out.emplace(std::vector<int>{}, a.matrix());
    } else if (a.is_polynomial()) {
        for (const auto& [e, c] : a.polynomial().terms()) out.emplace(e, Matrix::Constant(1, 1, c));
    } else {
        for (const auto& term : a.terms()) {
            auto left = split_central(term.left);
            auto right = split_central(term.right);
            for (const auto& [kl, ml] : left) {
                for (const auto& [kr, mr] : right) {
                    std::vector<int> key = kl;
                    key.insert(key.end(), kr.begin(), kr.end());
                    accumulate(out, key, kron(ml, mr));
                }
            }
        }
    }
    return out;
}

AlgebraElement join_central(const AlgebraDescriptor& algebra, const CentralSplit& split) {
    switch (algebra.kind()) {
        case AlgebraDescriptor::Kind::Matrix: {
            const int n = algebra.dimension();
            Matrix m = Matrix::Zero(n, n);
            for (const auto& [key, value] : split) m += value;
            return AlgebraElement(algebra, std::move(m));
        }
        case AlgebraDescriptor::Kind::Polynomial: {
            Polynomial p(algebra.num_variables());
            for (const auto& [key, value] : split) p.add_term(key, value(0, 0));
            return AlgebraElement(algebra, std::move(p));
        }
        case AlgebraDescriptor::Kind::Tensor: {
            const int left_vars = central_variable_count(algebra.left());
            const int nl = matrix_part_dimension(algebra.left());
            const int nr = matrix_part_dimension(algebra.right());
            AlgebraElement::TensorSum terms;
            for (const auto& [key, value] : split) {
                std::vector<int> kl(key.begin(), key.begin() + left_vars);
                std::vector<int> kr(key.begin() + left_vars, key.end());
                for (int i = 0; i < nl; ++i) {
                    for (int j = 0; j < nl; ++j) {
                        Matrix block = value.block(i * nr, j * nr, nr, nr);
                        if ((block.array() == Complex{}).all()) continue;
                        Matrix unit = Matrix::Zero(nl, nl);
                        unit(i, j) = 1.0;
                        terms.push_back(TensorTerm{join_central(algebra.left(), {{kl, unit}}),
                                                   join_central(algebra.right(), {{kr, block}})});
                    }
                }
            }
            return AlgebraElement(algebra, std::move(terms));
        }
    }
    throw Error("unknown algebra kind");
}

AlgebraElement central_monomial(const AlgebraDescriptor& algebra, const std::vector<int>& exponents,
                                Complex coefficient) {
    const int n = matrix_part_dimension(algebra);
    return join_central(algebra, {{exponents, coefficient * Matrix::Identity(n, n)}});
}

AlgebraElement central_coordinate(const AlgebraDescriptor& algebra, int index) {
    const int nv = central_variable_count(algebra);
    if (index < 0 || index >= nv) throw Error("central coordinate index out of range");
    std::vector<int> e(nv, 0);
    e[index] = 1;
    return central_monomial(algebra, e);
}

AlgebraElement matrix_part_element(const AlgebraDescriptor& algebra, const Matrix& m) {
    return join_central(algebra, {{std::vector<int>(central_variable_count(algebra), 0), m}});
}

std::optional<Complex> scalar_value(const AlgebraElement& a, double tolerance) {
    auto split = split_central(a);
    const std::vector<int> zero(central_variable_count(a.algebra()), 0);
    Complex value{};
    for (const auto& [key, m] : split) {
        if (key != zero) {
            if (m.norm() > tolerance) return std::nullopt;
            continue;
        }
        value = m.trace() / static_cast<double>(m.rows());
        Matrix rest = m - value * Matrix::Identity(m.rows(), m.cols());
        if (rest.norm() > tolerance) return std::nullopt;
    }
    return value;
}

}  // namespace supmech
