#include "ccgf/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace ccgf {

AlgebraElement::AlgebraElement(std::vector<Complex> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw DimensionError("algebra element needs at least one slot");
    }
}

AlgebraElement AlgebraElement::zero(int m) {
    return AlgebraElement(std::vector<Complex>(m, Complex(0.0, 0.0)));
}

AlgebraElement AlgebraElement::one(int m) {
    return AlgebraElement(std::vector<Complex>(m, Complex(1.0, 0.0)));
}

AlgebraElement AlgebraElement::scalar(int m, Complex value) {
    return AlgebraElement(std::vector<Complex>(m, value));
}

AlgebraElement AlgebraElement::from_real(const std::vector<double>& entries) {
    std::vector<Complex> v(entries.size());
    std::transform(entries.begin(), entries.end(), v.begin(),
                   [](double x) { return Complex(x, 0.0); });
    return AlgebraElement(std::move(v));
}

void require_same_algebra(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.size() != b.size()) {
        throw DimensionError("slot count mismatch: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& rhs) const {
    require_same_algebra(*this, rhs);
    std::vector<Complex> v(entries_.size());
    for (size_t s = 0; s < entries_.size(); ++s) v[s] = entries_[s] + rhs.entries_[s];
    return AlgebraElement(std::move(v));
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& rhs) const {
    require_same_algebra(*this, rhs);
    std::vector<Complex> v(entries_.size());
    for (size_t s = 0; s < entries_.size(); ++s) v[s] = entries_[s] - rhs.entries_[s];
    return AlgebraElement(std::move(v));
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& rhs) const {
    require_same_algebra(*this, rhs);
    std::vector<Complex> v(entries_.size());
    for (size_t s = 0; s < entries_.size(); ++s) v[s] = entries_[s] * rhs.entries_[s];
    return AlgebraElement(std::move(v));
}

AlgebraElement AlgebraElement::adjoint() const {
    std::vector<Complex> v(entries_.size());
    std::transform(entries_.begin(), entries_.end(), v.begin(),
                   [](const Complex& z) { return std::conj(z); });
    return AlgebraElement(std::move(v));
}

double AlgebraElement::norm() const {
    double n = 0.0;
    for (const Complex& z : entries_) n = std::max(n, std::abs(z));
    return n;
}

bool AlgebraElement::is_self_adjoint(double tol) const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [tol](const Complex& z) { return std::abs(z.imag()) <= tol; });
}

bool AlgebraElement::is_positive(double tol) const {
    return std::all_of(entries_.begin(), entries_.end(), [tol](const Complex& z) {
        return std::abs(z.imag()) <= tol && z.real() >= -tol;
    });
}

AlgebraElement AlgebraElement::sqrt(double tol) const {
    if (!is_positive(tol)) {
        throw PositivityError("sqrt requires a positive element");
    }
    std::vector<Complex> v(entries_.size());
    for (size_t s = 0; s < entries_.size(); ++s) {
        v[s] = Complex(std::sqrt(std::max(entries_[s].real(), 0.0)), 0.0);
    }
    return AlgebraElement(std::move(v));
}

AlgebraElement AlgebraElement::inverse(double tol) const {
    std::vector<Complex> v(entries_.size());
    for (size_t s = 0; s < entries_.size(); ++s) {
        if (std::abs(entries_[s]) <= tol) {
            throw SingularError("slot " + std::to_string(s) + " is not invertible");
        }
        v[s] = Complex(1.0, 0.0) / entries_[s];
    }
    return AlgebraElement(std::move(v));
}

bool leq(const AlgebraElement& a, const AlgebraElement& b, double tol) {
    require_same_algebra(a, b);
    if (!a.is_self_adjoint(tol) || !b.is_self_adjoint(tol)) {
        throw OrderError("order comparison requires self-adjoint elements");
    }
    for (int s = 0; s < a.size(); ++s) {
        if (b[s].real() - a[s].real() < -tol) return false;
    }
    return true;
}

}  // namespace ccgf
