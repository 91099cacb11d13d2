#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace supmech {

using Complex = std::complex<double>;

/// Sparse multivariate polynomial with complex coefficients.
///
/// Terms are keyed by exponent vectors; coefficients that are exactly zero
/// are never stored. Multiplication is arranged so that `a * b` and `b * a`
/// perform the same floating-point operations, which makes the product
/// commutative bit for bit.
class Polynomial {
   public:
    using Exponents = std::vector<int>;
    using Terms = std::map<Exponents, Complex>;

    explicit Polynomial(int num_variables = 0);

    static Polynomial constant(int num_variables, Complex value);
    static Polynomial variable(int num_variables, int index, Complex coefficient = 1.0);
    static Polynomial monomial(int num_variables, Exponents exponents, Complex coefficient = 1.0);

    int num_variables() const { return num_variables_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    Complex coefficient(const Exponents& exponents) const;
    Complex constant_term() const;
    void add_term(const Exponents& exponents, Complex coefficient);

    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    double max_abs_coefficient() const;

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(Complex scale);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.num_variables_ == b.num_variables_ && a.terms_ == b.terms_;
    }

    Polynomial conj() const;
    Polynomial derivative(int index) const;
    Complex evaluate(std::span<const double> point) const;
    Complex evaluate(std::span<const Complex> point) const;

    /// Returns f(M x + c): substitutes each variable by an affine form.
    Polynomial compose_affine(const Eigen::MatrixXd& linear, const Eigen::VectorXd& offset) const;

    std::string to_string() const;

   private:
    int num_variables_;
    Terms terms_;
};

/// All exponent vectors in `num_variables` variables with total degree <= max_degree,
/// ordered by degree then lexicographically.
std::vector<Polynomial::Exponents> monomials_up_to(int num_variables, int max_degree);

}  // namespace supmech
