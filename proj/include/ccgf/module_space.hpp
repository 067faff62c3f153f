#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ccgf/algebra.hpp"
#include "ccgf/errors.hpp"
#include "ccgf/rng.hpp"
#include "ccgf/tolerances.hpp"

namespace ccgf {

/**
 * ModuleVector: an element of the free module A^n over A = C^m, stored as m
 * independent slot vectors in C^n. The A-valued inner product is the ordinary
 * C^n inner product taken slot by slot; it is conjugate-linear in the second
 * argument, matching <af, g> = a<f, g>.
 */
class ModuleVector {
public:
    ModuleVector(int m, int n);
    explicit ModuleVector(std::vector<Eigen::VectorXcd> slots);

    /// e_i in A^n: the i-th standard basis vector in every slot.
    static ModuleVector basis(int m, int n, int i);
    /// Slot-wise standard complex Gaussian draw.
    static ModuleVector random(int m, int n, Rng& rng);

    int slot_count() const { return static_cast<int>(slots_.size()); }
    int dim() const { return static_cast<int>(slots_.front().size()); }
    Eigen::VectorXcd& slot(int s) { return slots_[s]; }
    const Eigen::VectorXcd& slot(int s) const { return slots_[s]; }

    ModuleVector operator+(const ModuleVector& rhs) const;
    ModuleVector operator-(const ModuleVector& rhs) const;
    ModuleVector scaled(Complex alpha) const;
    /// Module action of a in A: slot s is multiplied by a[s].
    ModuleVector scaled(const AlgebraElement& a) const;

    /// ||f|| = ||<f,f>||^(1/2), the max slot Euclidean norm.
    double norm() const;

private:
    std::vector<Eigen::VectorXcd> slots_;
};

/// A-valued inner product, slot s: <f,g>_s = sum_i f[s,i] * conj(g[s,i]).
AlgebraElement inner_product(const ModuleVector& f, const ModuleVector& g);

/**
 * AdjointableOp: an adjointable A-linear map A^n -> A^p, one complex p x n
 * block per slot. The adjoint is the slot-wise conjugate transpose; the norm
 * is the max slot spectral norm.
 */
class AdjointableOp {
public:
    explicit AdjointableOp(std::vector<Eigen::MatrixXcd> blocks);

    static AdjointableOp identity(int m, int n);
    static AdjointableOp zero(int m, int p, int n);
    /// alpha * identity on A^n.
    static AdjointableOp scalar(int m, int n, Complex alpha);
    /// Diagonal operator with prescribed per-slot diagonals (each length n).
    static AdjointableOp diagonal(const std::vector<Eigen::VectorXcd>& diags);

    int slot_count() const { return static_cast<int>(blocks_.size()); }
    int codomain_dim() const { return static_cast<int>(blocks_.front().rows()); }
    int domain_dim() const { return static_cast<int>(blocks_.front().cols()); }
    const Eigen::MatrixXcd& block(int s) const { return blocks_[s]; }

    ModuleVector apply(const ModuleVector& f) const;
    /// this after rhs: (this * rhs)(f) = this(rhs(f)).
    AdjointableOp compose(const AdjointableOp& rhs) const;
    AdjointableOp adjoint() const;
    AdjointableOp operator+(const AdjointableOp& rhs) const;
    AdjointableOp operator-(const AdjointableOp& rhs) const;
    AdjointableOp scaled(Complex alpha) const;
    /// Per-slot scalar action: block s is multiplied by a[s].
    AdjointableOp scaled(const AlgebraElement& a) const;

    double norm() const;

private:
    std::vector<Eigen::MatrixXcd> blocks_;
};

/// Structural flags plus the extremal singular values across slots.
/// bounded_below <=> min_gap > kAlgebraTol; gl_plus = positive and invertible.
struct OpClassification {
    bool self_adjoint = false;
    bool positive = false;
    bool invertible = false;
    bool gl_plus = false;
    bool bounded_below = false;
    double norm = 0.0;
    double min_gap = 0.0;
};

OpClassification classify(const AdjointableOp& T);

struct CommutationCheck {
    bool commute = false;
    double residual = 0.0;
};

/// ||TS - ST|| against tol * (1 + ||T|| * ||S||).
CommutationCheck commutes(const AdjointableOp& T, const AdjointableOp& S,
                          double tol = kCommutationTol);

/// Principal square root of a positive operator via per-slot Hermitian
/// eigendecomposition; eigenvalues in [-kAlgebraTol, 0) are clamped to zero.
AdjointableOp op_sqrt(const AdjointableOp& T);

/// Slot-wise inverse; SingularError when min_gap <= tol.
AdjointableOp op_inverse(const AdjointableOp& T, double tol = kAlgebraTol);

/// f(T) = Q f(diag) Q* for self-adjoint T, with eigenvalues below `floor`
/// treated as zero (pseudo-inverse style). Used for S^(-1/2) with range control.
AdjointableOp hermitian_function(const AdjointableOp& T, double (*f)(double), double floor);

/**
 * Projector: an orthogonal projector onto a submodule of A^n, stored as its
 * operator with per-slot ranks. Construction validates idempotency and
 * self-adjointness within kProjectorTol.
 */
class Projector {
public:
    explicit Projector(AdjointableOp P, double tol = kProjectorTol);

    static Projector identity(int m, int n);
    /// Projector onto the coordinate submodule spanned by {e_i : i in coords}.
    static Projector coordinates(int m, int n, const std::vector<int>& coords);

    const AdjointableOp& op() const { return op_; }
    const std::vector<int>& ranks() const { return ranks_; }
    int slot_count() const { return op_.slot_count(); }
    int dim() const { return op_.domain_dim(); }

    Projector complement() const;

private:
    AdjointableOp op_;
    std::vector<int> ranks_;
};

/// Orthogonal projector onto the slot-wise span of the generators. The rank
/// decision uses singular values against tol_rank * sigma_max.
Projector projector_from_generators(const std::vector<ModuleVector>& generators,
                                    double tol_rank = kProjectorTol);

/// Throws DimensionError unless the operators share slot count, plus domain /
/// codomain as requested by the caller sites.
void require_same_shape(const AdjointableOp& a, const AdjointableOp& b);

}  // namespace ccgf
