#include "supmech/forms.hpp"

#include <algorithm>

#include "supmech/errors.hpp"
#include "supmech/morphism.hpp"

namespace supmech {

namespace {

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

/// Sorts `indices` in place and returns the permutation sign, or 0 on a repeat.
int sort_with_sign(std::vector<int>& indices) {
    int sign = 1;
    for (std::size_t i = 1; i < indices.size(); ++i) {
        for (std::size_t j = i; j > 0 && indices[j - 1] > indices[j]; --j) {
            std::swap(indices[j - 1], indices[j]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < indices.size(); ++i) {
        if (indices[i - 1] == indices[i]) return 0;
    }
    return sign;
}

void require_same_basis(const DifferentialForm& a, const DifferentialForm& b) {
    if (a.basis() != b.basis()) {
        throw BasisMismatch("forms over different bases: " + a.basis().signature() + " vs " + b.basis().signature());
    }
}

void require_basis_algebra(const DerivationBasis& basis, const Derivation& x) {
    if (x.algebra() != basis.algebra()) throw AlgebraMismatch("derivation does not act on the form's algebra");
}

}  // namespace

std::vector<std::vector<int>> increasing_tuples(int m, int p) {
    std::vector<std::vector<int>> out;
    if (p > m) return out;
    std::vector<int> t(p);
    for (int i = 0; i < p; ++i) t[i] = i;
    while (true) {
        out.push_back(t);
        // colex successor: bump the first entry that can move
        int i = 0;
        while (i < p && t[i] + 1 == (i + 1 < p ? t[i + 1] : m)) ++i;
        if (i == p) break;
        ++t[i];
        for (int j = 0; j < i; ++j) t[j] = j;
    }
    return out;
}

DifferentialForm::DifferentialForm(DerivationBasis basis, int degree) : basis_(std::move(basis)), degree_(degree) {
    if (degree < 0) throw Error("form degree must be nonnegative");
    const std::size_t count = binomial(static_cast<int>(basis_.size()), degree);
    values_.assign(count, AlgebraElement::zero(basis_.algebra()));
}

DifferentialForm DifferentialForm::function(DerivationBasis basis, const AlgebraElement& value) {
    if (value.algebra() != basis.algebra()) throw AlgebraMismatch("0-form value outside the basis algebra");
    DifferentialForm f(std::move(basis), 0);
    f.values_[0] = value;
    return f;
}

std::vector<std::vector<int>> DifferentialForm::index_tuples() const {
    return increasing_tuples(static_cast<int>(basis_.size()), degree_);
}

std::size_t DifferentialForm::storage_index(const std::vector<int>& increasing) const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < increasing.size(); ++i) r += binomial(increasing[i], static_cast<int>(i) + 1);
    return r;
}

AlgebraElement DifferentialForm::at(const std::vector<int>& indices) const {
    if (static_cast<int>(indices.size()) != degree_) throw Error("wrong number of form arguments");
    std::vector<int> sorted = indices;
    const int sign = sort_with_sign(sorted);
    if (sign == 0) return AlgebraElement::zero(algebra());
    const auto& v = values_[storage_index(sorted)];
    return sign > 0 ? v : -v;
}

void DifferentialForm::set(const std::vector<int>& indices, const AlgebraElement& value) {
    if (static_cast<int>(indices.size()) != degree_) throw Error("wrong number of form arguments");
    if (value.algebra() != algebra()) throw AlgebraMismatch("form value outside the basis algebra");
    for (int i : indices) {
        if (i < 0 || i >= static_cast<int>(basis_.size())) throw Error("form index out of range");
    }
    std::vector<int> sorted = indices;
    const int sign = sort_with_sign(sorted);
    if (sign == 0) throw Error("repeated index in form entry");
    values_[storage_index(sorted)] = sign > 0 ? value : -value;
}

AlgebraElement DifferentialForm::evaluate(const std::vector<Derivation>& arguments) const {
    if (static_cast<int>(arguments.size()) != degree_) throw Error("wrong number of form arguments");
    std::vector<std::vector<AlgebraElement>> coeffs;
    coeffs.reserve(arguments.size());
    for (const auto& x : arguments) {
        require_basis_algebra(basis_, x);
        coeffs.push_back(basis_.expand(x));
    }
    return evaluate_coefficients(coeffs);
}

AlgebraElement DifferentialForm::evaluate_coefficients(
    const std::vector<std::vector<AlgebraElement>>& coefficients) const {
    if (static_cast<int>(coefficients.size()) != degree_) throw Error("wrong number of form arguments");
    if (degree_ == 0) return values_[0];
    const int m = static_cast<int>(basis_.size());
    AlgebraElement total = AlgebraElement::zero(algebra());
    std::vector<int> idx(degree_);
    // depth-first over slots, skipping exact zeros and repeated indices
    auto recurse = [&](auto&& self, int slot, const AlgebraElement& weight) -> void {
        if (slot == degree_) {
            total += weight * at(idx);
            return;
        }
        for (int k = 0; k < m; ++k) {
            const auto& c = coefficients[slot][k];
            if (c.is_exactly_zero()) continue;
            if (std::find(idx.begin(), idx.begin() + slot, k) != idx.begin() + slot) continue;
            idx[slot] = k;
            self(self, slot + 1, weight * c);
        }
    };
    recurse(recurse, 0, AlgebraElement::unit(algebra()));
    return total;
}

double DifferentialForm::max_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, v.norm());
    return m;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& other) {
    require_same_basis(*this, other);
    if (other.degree_ != degree_) throw Error("adding forms of different degree");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

DifferentialForm& DifferentialForm::operator-=(const DifferentialForm& other) {
    require_same_basis(*this, other);
    if (other.degree_ != degree_) throw Error("subtracting forms of different degree");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

DifferentialForm& DifferentialForm::operator*=(Complex s) {
    for (auto& v : values_) v *= s;
    return *this;
}

AlgebraElement evaluate(const DifferentialForm& form, const std::vector<Derivation>& arguments) {
    return form.evaluate(arguments);
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_basis(a, b);
    const int p = a.degree();
    const int q = b.degree();
    DifferentialForm out(a.basis(), p + q);
    const auto tuples = out.index_tuples();
    const auto shuffles = increasing_tuples(p + q, p);
    for (const auto& t : tuples) {
        AlgebraElement value = AlgebraElement::zero(a.algebra());
        for (const auto& s : shuffles) {
            std::vector<int> left;
            std::vector<int> right;
            int parity = 0;
            std::size_t next = 0;
            for (int pos = 0; pos < p + q; ++pos) {
                if (next < s.size() && s[next] == pos) {
                    parity += pos - static_cast<int>(next);
                    left.push_back(t[pos]);
                    ++next;
                } else {
                    right.push_back(t[pos]);
                }
            }
            auto term = a.at(left) * b.at(right);
            if (parity % 2) {
                value -= term;
            } else {
                value += term;
            }
        }
        out.set(t, value);
    }
    return out;
}

DifferentialForm exterior_derivative(const DifferentialForm& a) {
    const auto& basis = a.basis();
    const int p = a.degree();
    const int m = static_cast<int>(basis.size());
    DifferentialForm out(basis, p + 1);
    for (const auto& t : out.index_tuples()) {
        AlgebraElement value = AlgebraElement::zero(a.algebra());
        for (int i = 0; i <= p; ++i) {
            std::vector<int> rest;
            for (int r = 0; r <= p; ++r) {
                if (r != i) rest.push_back(t[r]);
            }
            auto term = basis[t[i]].apply(a.at(rest));
            if (i % 2) {
                value -= term;
            } else {
                value += term;
            }
        }
        for (int i = 0; i <= p; ++i) {
            for (int j = i + 1; j <= p; ++j) {
                std::vector<int> args(1);
                for (int r = 0; r <= p; ++r) {
                    if (r != i && r != j) args.push_back(t[r]);
                }
                const Complex sign = ((i + j) % 2) ? -1.0 : 1.0;
                for (int k = 0; k < m; ++k) {
                    const Complex c = basis.structure_constant(t[i], t[j], k);
                    if (c == Complex{}) continue;
                    args[0] = k;
                    value += (sign * c) * a.at(args);
                }
            }
        }
        out.set(t, value);
    }
    return out;
}

DifferentialForm interior_product(const Derivation& x, const DifferentialForm& a) {
    if (a.degree() == 0) throw DegreeZero("interior product of a 0-form is zero by definition");
    require_basis_algebra(a.basis(), x);
    const auto coeffs = a.basis().expand(x);
    const int m = static_cast<int>(a.basis().size());
    DifferentialForm out(a.basis(), a.degree() - 1);
    for (const auto& t : out.index_tuples()) {
        AlgebraElement value = AlgebraElement::zero(a.algebra());
        std::vector<int> args(1);
        args.insert(args.end(), t.begin(), t.end());
        for (int k = 0; k < m; ++k) {
            if (coeffs[k].is_exactly_zero()) continue;
            args[0] = k;
            value += coeffs[k] * a.at(args);
        }
        out.set(t, value);
    }
    return out;
}

DifferentialForm lie_derivative(const Derivation& y, const DifferentialForm& a) {
    const auto& basis = a.basis();
    require_basis_algebra(basis, y);
    const int m = static_cast<int>(basis.size());
    const int p = a.degree();
    const auto coeffs = basis.expand(y);

    // Coordinates of [Y, X_j] = Σ_l (Σ_k y_k c^l_kj − X_j(y_l)) X_l.
    std::vector<std::vector<AlgebraElement>> bracket(m, std::vector<AlgebraElement>(m, AlgebraElement::zero(a.algebra())));
    if (p > 0) {
        for (int j = 0; j < m; ++j) {
            for (int l = 0; l < m; ++l) {
                AlgebraElement z = AlgebraElement::zero(a.algebra());
                for (int k = 0; k < m; ++k) {
                    const Complex c = basis.structure_constant(k, j, l);
                    if (c == Complex{} || coeffs[k].is_exactly_zero()) continue;
                    z += c * coeffs[k];
                }
                if (!coeffs[l].is_exactly_zero()) z -= basis[j].apply(coeffs[l]);
                bracket[j][l] = std::move(z);
            }
        }
    }

    DifferentialForm out(basis, p);
    for (const auto& t : out.index_tuples()) {
        AlgebraElement value = y.apply(a.at(t));
        for (int s = 0; s < p; ++s) {
            std::vector<int> args = t;
            for (int l = 0; l < m; ++l) {
                const auto& z = bracket[t[s]][l];
                if (z.is_exactly_zero()) continue;
                args[s] = l;
                value -= z * a.at(args);
            }
        }
        out.set(t, value);
    }
    return out;
}

DifferentialForm form_star(const DifferentialForm& a) {
    const auto& basis = a.basis();
    const int m = static_cast<int>(basis.size());
    const int p = a.degree();
    DifferentialForm out(basis, p);
    for (const auto& t : out.index_tuples()) {
        AlgebraElement value = AlgebraElement::zero(a.algebra());
        std::vector<int> idx(p);
        auto recurse = [&](auto&& self, int slot, Complex weight) -> void {
            if (slot == p) {
                value += weight * a.at(idx);
                return;
            }
            for (int k = 0; k < m; ++k) {
                const Complex s = basis.star_coefficient(t[slot], k);
                if (s == Complex{}) continue;
                idx[slot] = k;
                self(self, slot + 1, weight * s);
            }
        };
        recurse(recurse, 0, 1.0);
        out.set(t, star(value));
    }
    return out;
}

DifferentialForm pull_back(const AlgebraMorphism& phi, const DifferentialForm& form,
                           const DerivationBasis& source_basis) {
    if (phi.target() != form.algebra()) throw NotIsomorphism("morphism target differs from the form's algebra");
    if (phi.source() != source_basis.algebra()) throw NotIsomorphism("morphism source differs from the basis algebra");
    const auto inv = phi.inverse();
    std::vector<std::vector<AlgebraElement>> pushed;
    for (const auto& x : source_basis.elements()) pushed.push_back(form.basis().expand(push_forward(phi, x)));
    DifferentialForm out(source_basis, form.degree());
    for (const auto& t : out.index_tuples()) {
        std::vector<std::vector<AlgebraElement>> args;
        for (int i : t) args.push_back(pushed[i]);
        out.set(t, inv(form.evaluate_coefficients(args)));
    }
    return out;
}

DifferentialForm pull_back(const AlgebraMorphism& phi, const DifferentialForm& form) {
    return pull_back(phi, form, form.basis());
}

double form_distance(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_basis(a, b);
    if (a.degree() != b.degree()) throw Error("comparing forms of different degree");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        worst = std::max(worst, (a.values()[i] - b.values()[i]).norm());
    }
    return worst;
}

bool approx_equal(const DifferentialForm& a, const DifferentialForm& b, double tolerance) {
    return form_distance(a, b) <= tolerance;
}

DifferentialForm random_form(const DerivationBasis& basis, int degree, Rng& rng, int max_degree) {
    DifferentialForm out(basis, degree);
    for (const auto& t : out.index_tuples()) out.set(t, random_element(basis.algebra(), rng, max_degree));
    return out;
}

}  // namespace supmech
