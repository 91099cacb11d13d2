#include "supmech/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "supmech/errors.hpp"

namespace supmech {

Polynomial::Polynomial(int num_variables) : num_variables_(num_variables) {}

Polynomial Polynomial::constant(int num_variables, Complex value) {
    Polynomial p(num_variables);
    p.add_term(Exponents(num_variables, 0), value);
    return p;
}

Polynomial Polynomial::variable(int num_variables, int index, Complex coefficient) {
    if (index < 0 || index >= num_variables) throw Error("polynomial variable index out of range");
    Exponents e(num_variables, 0);
    e[index] = 1;
    Polynomial p(num_variables);
    p.add_term(e, coefficient);
    return p;
}

Polynomial Polynomial::monomial(int num_variables, Exponents exponents, Complex coefficient) {
    if (static_cast<int>(exponents.size()) != num_variables) throw Error("exponent vector has wrong length");
    for (int e : exponents) {
        if (e < 0) throw Error("negative exponent");
    }
    Polynomial p(num_variables);
    p.add_term(exponents, coefficient);
    return p;
}

Complex Polynomial::coefficient(const Exponents& exponents) const {
    auto it = terms_.find(exponents);
    return it == terms_.end() ? Complex{} : it->second;
}

Complex Polynomial::constant_term() const { return coefficient(Exponents(num_variables_, 0)); }

void Polynomial::add_term(const Exponents& exponents, Complex coefficient) {
    if (coefficient == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
    if (!inserted) {
        it->second += coefficient;
        if (it->second == Complex{}) terms_.erase(it);
    }
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int k : e) s += k;
        d = std::max(d, s);
    }
    return d;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents(num_variables_, 0));
}

double Polynomial::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    if (other.num_variables_ != num_variables_) throw AlgebraMismatch("polynomial variable count differs");
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    if (other.num_variables_ != num_variables_) throw AlgebraMismatch("polynomial variable count differs");
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(Complex scale) {
    if (scale == Complex{}) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= scale;
        if (it->second == Complex{}) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

namespace {

bool canonically_less(const Polynomial& a, const Polynomial& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    if (ta.size() != tb.size()) return ta.size() < tb.size();
    auto ia = ta.begin();
    auto ib = tb.begin();
    for (; ia != ta.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        if (ia->second.real() != ib->second.real()) return ia->second.real() < ib->second.real();
        if (ia->second.imag() != ib->second.imag()) return ia->second.imag() < ib->second.imag();
    }
    return false;
}

}  // namespace

namespace {
constexpr std::size_t kDenseProductLimit = 4096;
}  // namespace

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.num_variables_ != b.num_variables_) throw AlgebraMismatch("polynomial variable count differs");
    // Fix the loop order by a canonical ordering of the operands so that the
    // accumulation sequence is independent of argument order.
    const bool swap = canonically_less(b, a);
    const Polynomial& outer = swap ? b : a;
    const Polynomial& inner = swap ? a : b;
    Polynomial out(a.num_variables_);
    if (a.is_zero() || b.is_zero()) return out;
    const int n = a.num_variables_;
    Polynomial::Exponents e(n);

    // Accumulate densely over the exponent box when it is small; the map
    // lookups otherwise dominate. Variable 0 is the most significant digit, so
    // walking the box in index order visits exponents in map order.
    std::vector<int> extent(n, 0);
    for (const auto* p : {&a, &b}) {
        std::vector<int> top(n, 0);
        for (const auto& [ex, c] : p->terms_) {
            for (int k = 0; k < n; ++k) top[k] = std::max(top[k], ex[k]);
        }
        for (int k = 0; k < n; ++k) extent[k] += top[k];
    }
    std::size_t box = 1;
    std::vector<std::size_t> stride(n, 1);
    for (int k = n - 1; k >= 0 && box <= kDenseProductLimit; --k) {
        stride[k] = box;
        box *= static_cast<std::size_t>(extent[k] + 1);
    }
    if (box <= kDenseProductLimit) {
        std::vector<Complex> acc(box);
        std::vector<char> touched(box, 0);
        for (const auto& [ea, ca] : outer.terms_) {
            std::size_t base = 0;
            for (int k = 0; k < n; ++k) base += stride[k] * ea[k];
            for (const auto& [eb, cb] : inner.terms_) {
                std::size_t idx = base;
                for (int k = 0; k < n; ++k) idx += stride[k] * eb[k];
                acc[idx] += ca * cb;
                touched[idx] = 1;
            }
        }
        for (std::size_t idx = 0; idx < box; ++idx) {
            if (!touched[idx] || acc[idx] == Complex{}) continue;
            std::size_t r = idx;
            for (int k = 0; k < n; ++k) {
                e[k] = static_cast<int>(r / stride[k]);
                r %= stride[k];
            }
            out.terms_.emplace_hint(out.terms_.end(), e, acc[idx]);
        }
        return out;
    }
    for (const auto& [ea, ca] : outer.terms_) {
        for (const auto& [eb, cb] : inner.terms_) {
            for (int k = 0; k < a.num_variables_; ++k) e[k] = ea[k] + eb[k];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::conj() const {
    Polynomial out(num_variables_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, std::conj(c));
    return out;
}

Polynomial Polynomial::derivative(int index) const {
    if (index < 0 || index >= num_variables_) throw Error("polynomial variable index out of range");
    Polynomial out(num_variables_);
    for (const auto& [e, c] : terms_) {
        if (e[index] == 0) continue;
        Exponents d = e;
        d[index] -= 1;
        out.add_term(d, c * static_cast<double>(e[index]));
    }
    return out;
}

namespace {

template <class Scalar>
Complex evaluate_impl(const Polynomial::Terms& terms, std::span<const Scalar> point) {
    Complex sum{};
    for (const auto& [e, c] : terms) {
        Complex term = c;
        for (std::size_t k = 0; k < e.size(); ++k) {
            for (int j = 0; j < e[k]; ++j) term *= point[k];
        }
        sum += term;
    }
    return sum;
}

}  // namespace

Complex Polynomial::evaluate(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != num_variables_) throw Error("evaluation point has wrong dimension");
    return evaluate_impl(terms_, point);
}

Complex Polynomial::evaluate(std::span<const Complex> point) const {
    if (static_cast<int>(point.size()) != num_variables_) throw Error("evaluation point has wrong dimension");
    return evaluate_impl(terms_, point);
}

Polynomial Polynomial::compose_affine(const Eigen::MatrixXd& linear, const Eigen::VectorXd& offset) const {
    const int n = num_variables_;
    if (linear.rows() != n || linear.cols() != n || offset.size() != n) {
        throw Error("affine map has wrong dimensions");
    }
    std::vector<Polynomial> images;
    images.reserve(n);
    for (int i = 0; i < n; ++i) {
        Polynomial image = constant(n, offset[i]);
        for (int j = 0; j < n; ++j) {
            if (linear(i, j) != 0.0) image += variable(n, j, linear(i, j));
        }
        images.push_back(std::move(image));
    }
    Polynomial out(n);
    for (const auto& [e, c] : terms_) {
        Polynomial term = constant(n, c);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < e[k]; ++j) term = term * images[k];
        }
        out += term;
    }
    return out;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            os << "*x" << k;
            if (e[k] > 1) os << "^" << e[k];
        }
    }
    return os.str();
}

std::vector<Polynomial::Exponents> monomials_up_to(int num_variables, int max_degree) {
    std::vector<Polynomial::Exponents> out;
    Polynomial::Exponents e(num_variables, 0);
    // Enumerate by total degree so low-degree monomials come first.
    for (int degree = 0; degree <= max_degree; ++degree) {
        std::vector<Polynomial::Exponents> level;
        auto recurse = [&](auto&& self, int index, int remaining) -> void {
            if (index == num_variables - 1) {
                e[index] = remaining;
                level.push_back(e);
                return;
            }
            for (int k = remaining; k >= 0; --k) {
                e[index] = k;
                self(self, index + 1, remaining - k);
            }
        };
        if (num_variables == 0) {
            if (degree == 0) level.push_back(e);
        } else {
            recurse(recurse, 0, degree);
        }
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

}  // namespace supmech
