#pragma once

#include <complex>
#include <vector>

#include "ccgf/errors.hpp"
#include "ccgf/tolerances.hpp"

namespace ccgf {

using Complex = std::complex<double>;

/**
 * AlgebraElement: an element of the commutative C*-algebra C^m with pointwise
 * product, pointwise conjugation as the involution, and the max slot modulus
 * as the norm. Self-adjoint means every slot is real; positive means every
 * slot is real and nonnegative; both up to kAlgebraTol.
 */
class AlgebraElement {
public:
    explicit AlgebraElement(std::vector<Complex> entries);

    static AlgebraElement zero(int m);
    static AlgebraElement one(int m);
    static AlgebraElement scalar(int m, Complex value);
    static AlgebraElement from_real(const std::vector<double>& entries);

    int size() const { return static_cast<int>(entries_.size()); }
    const Complex& operator[](int s) const { return entries_[s]; }
    const std::vector<Complex>& entries() const { return entries_; }

    AlgebraElement operator+(const AlgebraElement& rhs) const;
    AlgebraElement operator-(const AlgebraElement& rhs) const;
    AlgebraElement operator*(const AlgebraElement& rhs) const;

    AlgebraElement adjoint() const;
    double norm() const;

    bool is_self_adjoint(double tol = kAlgebraTol) const;
    bool is_positive(double tol = kAlgebraTol) const;

    /// Pointwise principal square root. Requires positivity; slots inside the
    /// tolerance band below zero are clamped to zero first.
    AlgebraElement sqrt(double tol = kAlgebraTol) const;

    /// Pointwise inverse. Any slot with modulus <= tol is singular.
    AlgebraElement inverse(double tol = kAlgebraTol) const;

private:
    std::vector<Complex> entries_;
};

/// Order a <= b in the C*-sense: b - a positive. Both sides must be
/// self-adjoint within tol, otherwise OrderError.
bool leq(const AlgebraElement& a, const AlgebraElement& b, double tol = kAlgebraTol);

/// Throws DimensionError unless both elements live in the same C^m.
void require_same_algebra(const AlgebraElement& a, const AlgebraElement& b);

}  // namespace ccgf
