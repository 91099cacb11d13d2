#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "supmech/polynomial.hpp"
#include "supmech/random.hpp"

namespace supmech {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTolerance = 1e-10;

/// Describes one of the supported *-algebras: full matrix algebras M_n(C),
/// polynomial algebras on a 2n-dimensional phase space with coordinates
/// (q^1..q^n, p_1..p_n), and algebraic tensor products of these.
class AlgebraDescriptor {
   public:
    enum class Kind { Matrix, Polynomial, Tensor };

    static AlgebraDescriptor matrix(int n, double tolerance = kDefaultTolerance);
    static AlgebraDescriptor polynomial(int num_pairs, double tolerance = kDefaultTolerance);
    static AlgebraDescriptor tensor(const AlgebraDescriptor& left, const AlgebraDescriptor& right);

    Kind kind() const { return kind_; }
    bool is_matrix() const { return kind_ == Kind::Matrix; }
    bool is_polynomial() const { return kind_ == Kind::Polynomial; }
    bool is_tensor() const { return kind_ == Kind::Tensor; }

    /// Matrix size n for Matrix(n).
    int dimension() const;
    /// Number of canonical pairs n for Polynomial(n).
    int num_pairs() const;
    /// 2n for Polynomial(n).
    int num_variables() const { return 2 * num_pairs(); }

    const AlgebraDescriptor& left() const;
    const AlgebraDescriptor& right() const;

    double tolerance() const { return tolerance_; }
    AlgebraDescriptor with_tolerance(double tolerance) const;

    bool is_commutative() const;
    /// Side length of the flattened matrix when every factor is a matrix algebra.
    std::optional<int> flat_dimension() const;
    /// Complex vector-space dimension, when finite.
    std::optional<int> vector_dimension() const;

    std::string to_string() const;

    /// Structural equality; tolerances are not compared.
    friend bool operator==(const AlgebraDescriptor& a, const AlgebraDescriptor& b);
    friend bool operator!=(const AlgebraDescriptor& a, const AlgebraDescriptor& b) { return !(a == b); }

   private:
    AlgebraDescriptor(Kind kind, int n, double tolerance) : kind_(kind), n_(n), tolerance_(tolerance) {}

    Kind kind_;
    int n_;
    double tolerance_;
    std::shared_ptr<const AlgebraDescriptor> left_;
    std::shared_ptr<const AlgebraDescriptor> right_;
};

enum class CenterKind { ScalarsOnly, WholeAlgebra, LeftFactorCentral, RightFactorCentral, Mixed };

std::string to_string(CenterKind kind);

struct TensorTerm;

/// An element of a *-algebra. Values are immutable once constructed; every
/// operation returns a new element.
///
/// Tensor elements are kept in canonical form: the left factor of each term is
/// a standard basis element of the left algebra (a matrix unit or a monomial
/// with unit coefficient), so terms with the same left factor are always
/// merged, and terms whose right factor is exactly zero are dropped.
class AlgebraElement {
   public:
    using TensorSum = std::vector<TensorTerm>;

    AlgebraElement();
    AlgebraElement(AlgebraDescriptor algebra, Matrix value);
    AlgebraElement(AlgebraDescriptor algebra, Polynomial value);
    AlgebraElement(AlgebraDescriptor algebra, TensorSum terms);

    static AlgebraElement zero(const AlgebraDescriptor& algebra);
    static AlgebraElement unit(const AlgebraDescriptor& algebra);
    static AlgebraElement scalar(const AlgebraDescriptor& algebra, Complex value);

    const AlgebraDescriptor& algebra() const { return algebra_; }
    bool is_matrix() const { return std::holds_alternative<Matrix>(payload_); }
    bool is_polynomial() const { return std::holds_alternative<Polynomial>(payload_); }
    bool is_tensor() const { return std::holds_alternative<TensorSum>(payload_); }

    const Matrix& matrix() const;
    const Polynomial& polynomial() const;
    const TensorSum& terms() const;

    /// Frobenius norm for matrices, max coefficient modulus for polynomials,
    /// flattened coefficient 2-norm for tensors.
    double norm() const;
    bool is_zero() const { return norm() <= algebra_.tolerance(); }
    /// True when the payload holds no nonzero number at all.
    bool is_exactly_zero() const;

    AlgebraElement& operator+=(const AlgebraElement& other);
    AlgebraElement& operator-=(const AlgebraElement& other);
    AlgebraElement& operator*=(Complex scale);

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator-(AlgebraElement a) { return a *= -1.0; }
    friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

    std::string to_string() const;

   private:
    AlgebraDescriptor algebra_;
    std::variant<Matrix, Polynomial, TensorSum> payload_;
};

struct TensorTerm {
    AlgebraElement left;
    AlgebraElement right;
};

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(Complex z, const AlgebraElement& a);

/// Antilinear involution: conjugate transpose, coefficient conjugation, or factor-wise.
AlgebraElement star(const AlgebraElement& a);
AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b);

bool approx_equal(const AlgebraElement& a, const AlgebraElement& b);
bool approx_equal(const AlgebraElement& a, const AlgebraElement& b, double tolerance);

bool is_central(const AlgebraElement& a);
CenterKind center_description(const AlgebraDescriptor& algebra);
bool hermitian_part_check(const AlgebraElement& a);

/// a ⊗ b in Tensor(a.algebra(), b.algebra()).
AlgebraElement tensor_element(const AlgebraElement& a, const AlgebraElement& b);
/// A ↦ A ⊗ I.
AlgebraElement embed_left(const AlgebraElement& a, const AlgebraDescriptor& right);
/// B ↦ I ⊗ B.
AlgebraElement embed_right(const AlgebraDescriptor& left, const AlgebraElement& b);

/// Kronecker flattening of a Matrix or nested Matrix ⊗ Matrix element.
Matrix flatten(const AlgebraElement& a);
/// Inverse of flatten for algebras with a flat dimension.
AlgebraElement unflatten(const AlgebraDescriptor& algebra, const Matrix& m);

/// Coordinates in the standard basis for finite-dimensional algebras
/// (column-major entries of the flattened matrix).
Eigen::VectorXcd coordinates(const AlgebraElement& a);

/// Standard basis: matrix units, monomials up to `max_degree`, or products of factor bases.
std::vector<AlgebraElement> algebra_basis(const AlgebraDescriptor& algebra, int max_degree = 2);

/// A generating set: matrix units, coordinate functions, or their embeddings.
std::vector<AlgebraElement> algebra_generators(const AlgebraDescriptor& algebra);

/// Polynomial coordinate function ξ^index (0-based; q's first then p's).
AlgebraElement coordinate(const AlgebraDescriptor& algebra, int index);

/// Random element with coefficients uniform in [-1, 1) + i[-1, 1).
AlgebraElement random_element(const AlgebraDescriptor& algebra, Rng& rng, int max_degree = 2);
AlgebraElement random_hermitian(const AlgebraDescriptor& algebra, Rng& rng, int max_degree = 2);

/// Standard Pauli matrices in Matrix(2).
AlgebraElement pauli_x(double tolerance = kDefaultTolerance);
AlgebraElement pauli_y(double tolerance = kDefaultTolerance);
AlgebraElement pauli_z(double tolerance = kDefaultTolerance);

}  // namespace supmech
