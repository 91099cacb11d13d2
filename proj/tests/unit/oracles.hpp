#pragma once

// Reference constructions built directly on Eigen, independent of the library.

#include <Eigen/Dense>
#include <complex>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;

inline const C I{0.0, 1.0};

inline M sx() {
    M m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline M sy() {
    M m(2, 2);
    m << 0, -I, I, 0;
    return m;
}
inline M sz() {
    M m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
inline M id(int n) { return M::Identity(n, n); }

inline M kron(const M& a, const M& b) {
    M out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

inline M commutator(const M& a, const M& b) { return a * b - b * a; }

/// exp(i t H) for Hermitian H.
inline M unitary(const M& h, double t) {
    Eigen::SelfAdjointEigenSolver<M> es(h);
    const Eigen::VectorXcd phases = (I * t * es.eigenvalues().cast<C>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Heisenberg picture with dA/dt = (−iħ)⁻¹[H, A]: A(t) = e^{iHt/ħ} A e^{−iHt/ħ}.
inline M heisenberg(const M& h, const M& a, double t, double hbar = 1.0) {
    const M u = unitary(h, t / hbar);
    return u * a * u.adjoint();
}

}  // namespace oracle
