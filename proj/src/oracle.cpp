#include "ccgf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccgf/rng.hpp"

namespace ccgf::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * CMat: minimal dense complex matrix used only inside the oracle, so the
 * verification route owns its arithmetic end to end. Row-major.
 */
struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<Complex> a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Complex(0, 0)) {}

    Complex& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const Complex& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static CMat eye(int n) {
        CMat I(n, n);
        for (int i = 0; i < n; ++i) I.at(i, i) = Complex(1, 0);
        return I;
    }

    static CMat from_block(const Eigen::MatrixXcd& B) {
        CMat M(static_cast<int>(B.rows()), static_cast<int>(B.cols()));
        for (int r = 0; r < M.rows; ++r)
            for (int c = 0; c < M.cols; ++c) M.at(r, c) = B(r, c);
        return M;
    }

    CMat mul(const CMat& rhs) const {
        CMat out(rows, rhs.cols);
        for (int i = 0; i < rows; ++i) {
            for (int k = 0; k < cols; ++k) {
                Complex aik = at(i, k);
                if (aik == Complex(0, 0)) continue;
                for (int j = 0; j < rhs.cols; ++j) out.at(i, j) += aik * rhs.at(k, j);
            }
        }
        return out;
    }

    CMat hconj() const {
        CMat out(cols, rows);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) out.at(c, r) = std::conj(at(r, c));
        return out;
    }

    void axpy(double alpha, const CMat& rhs) {
        for (size_t i = 0; i < a.size(); ++i) a[i] += alpha * rhs.a[i];
    }

    /// Gershgorin-style bound on the spectral radius: max absolute row sum.
    double row_sum_bound() const {
        double best = 0.0;
        for (int r = 0; r < rows; ++r) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c) s += std::abs(at(r, c));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double best = 0.0;
        for (const Complex& z : a) best = std::max(best, std::abs(z));
        return best;
    }
};

std::vector<Complex> matvec(const CMat& M, const std::vector<Complex>& x) {
    std::vector<Complex> y(M.rows, Complex(0, 0));
    for (int r = 0; r < M.rows; ++r) {
        Complex acc(0, 0);
        for (int c = 0; c < M.cols; ++c) acc += M.at(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

double vec_norm(const std::vector<Complex>& x) {
    double s = 0.0;
    for (const Complex& z : x) s += std::norm(z);
    return std::sqrt(s);
}

/// Largest eigenvalue of a Hermitian PSD matrix by plain power iteration with
/// a Rayleigh-quotient stop. Deterministic start vector.
double power_lambda_max(const CMat& M) {
    const int n = M.rows;
    if (n == 1) return M.at(0, 0).real();
    Rng rng(0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(n));
    std::vector<Complex> z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.cnormal();
    double zn = vec_norm(z);
    for (auto& c : z) c /= zn;

    double rho = 0.0;
    int stable = 0;
    for (int it = 0; it < 300000; ++it) {
        std::vector<Complex> w = matvec(M, z);
        double wn = vec_norm(w);
        if (wn < 1e-300) return 0.0;  // z in the kernel and M z == 0: top eigenvalue is 0
        Complex dot(0, 0);
        for (int i = 0; i < n; ++i) dot += std::conj(z[i]) * w[i];
        double rho_next = dot.real();
        if (it >= 16 && std::abs(rho_next - rho) <= 1e-16 * std::max(1.0, std::abs(rho_next))) {
            if (++stable >= 4) return rho_next;
        } else {
            stable = 0;
        }
        rho = rho_next;
        for (int i = 0; i < n; ++i) z[i] = w[i] / wn;
    }
    return rho;
}

/// Smallest eigenvalue of a Hermitian matrix via the spectral shift
/// lambda_min(M) = c - lambda_max(cI - M) with c >= rho(M).
double shifted_lambda_min(const CMat& M) {
    double c = M.row_sum_bound() + 1.0;
    CMat shifted = CMat::eye(M.rows);
    for (int r = 0; r < M.rows; ++r)
        for (int col = 0; col < M.cols; ++col)
            shifted.at(r, col) = (r == col ? Complex(c, 0) : Complex(0, 0)) - M.at(r, col);
    return c - power_lambda_max(shifted);
}

double shifted_lambda_max(const CMat& M) {
    double c = M.row_sum_bound() + 1.0;
    CMat shifted(M.rows, M.cols);
    for (int r = 0; r < M.rows; ++r)
        for (int col = 0; col < M.cols; ++col)
            shifted.at(r, col) = (r == col ? Complex(c, 0) : Complex(0, 0)) + M.at(r, col);
    return power_lambda_max(shifted) - c;
}

/// S_s = sum_j v_j[s]^2 C'_s (Lambda_s P_s)^H (Lambda_s P_s) C_s, accumulated
/// densely with the oracle's own arithmetic.
CMat assemble_slot_frame_operator(const GFusionSystem& sys, const ControllerPair& ctrl, int s) {
    const int n = sys.dim();
    CMat C = CMat::from_block(ctrl.C().block(s));
    CMat Cp = CMat::from_block(ctrl.C_prime().block(s));
    CMat S(n, n);
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        CMat L = CMat::from_block(mb.Lambda.block(s));
        CMat P = CMat::from_block(mb.P.op().block(s));
        CMat LP = L.mul(P);
        CMat phi = LP.hconj().mul(LP);
        CMat term = Cp.mul(phi).mul(C);
        double v = mb.v[s].real();
        S.axpy(v * v, term);
    }
    return S;
}

void require_validated(const ControllerPair& ctrl) {
    if (!ctrl.validated()) {
        throw CommutationError("oracle refuses unvalidated controller pairs");
    }
}

}  // namespace

OracleReport slotwise_bounds(const GFusionSystem& sys, const ControllerPair& ctrl) {
    require_validated(ctrl);
    OracleReport rep;
    rep.per_slot.resize(sys.slot_count());
    double a = kInf;
    double b = -kInf;
    for (int s = 0; s < sys.slot_count(); ++s) {
        CMat S = assemble_slot_frame_operator(sys, ctrl, s);
        // Symmetrize: the accumulation of a validated instance is Hermitian up
        // to roundoff, and power iteration assumes it exactly.
        CMat H = S;
        for (int r = 0; r < H.rows; ++r)
            for (int c = 0; c < H.cols; ++c)
                H.at(r, c) = 0.5 * (S.at(r, c) + std::conj(S.at(c, r)));
        rep.per_slot[s].lambda_max = power_lambda_max(H);
        rep.per_slot[s].lambda_min = shifted_lambda_min(H);
        a = std::min(a, rep.per_slot[s].lambda_min);
        b = std::max(b, rep.per_slot[s].lambda_max);
    }
    rep.A_oracle = a;
    rep.B_oracle = b;
    return rep;
}

double k_bound_bisection(const GFusionSystem& sys, const ControllerPair& ctrl,
                         const AdjointableOp& K, double tol_bisect) {
    require_validated(ctrl);
    if (K.slot_count() != sys.slot_count() || K.domain_dim() != sys.dim() ||
        K.codomain_dim() != sys.dim()) {
        throw DimensionError("K must be a square operator on the system module");
    }
    const int m = sys.slot_count();
    std::vector<CMat> S(m), KK(m);
    double kk_top = 0.0;
    double b_oracle = 0.0;
    for (int s = 0; s < m; ++s) {
        S[s] = assemble_slot_frame_operator(sys, ctrl, s);
        CMat Ks = CMat::from_block(K.block(s));
        KK[s] = Ks.mul(Ks.hconj());
        kk_top = std::max(kk_top, shifted_lambda_max(KK[s]));
        b_oracle = std::max(b_oracle, power_lambda_max(S[s]));
    }
    if (kk_top <= kAlgebraTol * kAlgebraTol) return kInf;  // KK* = 0: vacuous bound

    // A KK* <= S forces A <= B / lambda_max(KK*) (test the top eigenvector),
    // so [0, that + 1] brackets the optimum even for singular K.
    double hi = b_oracle / kk_top + 1.0;
    double lo = 0.0;
    auto feasible = [&](double A) {
        for (int s = 0; s < m; ++s) {
            CMat D = S[s];
            D.axpy(-A, KK[s]);
            double guard = kAlgebraTol * std::max(1.0, S[s].max_abs() + A * KK[s].max_abs());
            if (shifted_lambda_min(D) < -guard) return false;
        }
        return true;
    };
    if (feasible(hi)) return hi;
    while (hi - lo > tol_bisect) {
        double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

namespace {

/// Direct-sum norm of the family {v_j Lambda_j P_j R f}_j for a given root R.
double family_norm(const GFusionSystem& sys, const ModuleVector& rf) {
    AlgebraElement g = AlgebraElement::zero(sys.slot_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        ModuleVector t = mb.Lambda.apply(mb.P.op().apply(rf)).scaled(mb.v);
        g = g + inner_product(t, t);
    }
    return std::sqrt(g.norm());
}

double difference_norm(const GFusionSystem& lam, const GFusionSystem& gam,
                       const ModuleVector& rf) {
    if (gam.member_count() != lam.member_count()) {
        throw DimensionError("perturbation families must have equal member counts");
    }
    AlgebraElement g = AlgebraElement::zero(lam.slot_count());
    for (int j = 0; j < lam.member_count(); ++j) {
        const FrameMember& a = lam.member(j);
        const FrameMember& b = gam.member(j);
        ModuleVector ta = a.Lambda.apply(a.P.op().apply(rf)).scaled(a.v);
        ModuleVector tb = b.Lambda.apply(b.P.op().apply(rf)).scaled(b.v);
        g = g + inner_product(ta - tb, ta - tb);
    }
    return std::sqrt(g.norm());
}

}  // namespace

SampledCheck sampled_check(Predicate predicate, const PredicateInstance& inst, int n_samples,
                           uint64_t seed) {
    if (inst.system == nullptr || inst.ctrl == nullptr) {
        throw ParamError("sampled_check needs a system and controllers");
    }
    const GFusionSystem& sys = *inst.system;
    const ControllerPair& ctrl = *inst.ctrl;
    require_validated(ctrl);
    bool needs_k = predicate == Predicate::eq_k_order || predicate == Predicate::eq_k_norm ||
                   predicate == Predicate::perturbation_hypothesis;
    if (needs_k && inst.K == nullptr) throw ParamError("predicate needs K");
    if (predicate == Predicate::perturbation_hypothesis && inst.gamma_system == nullptr) {
        throw ParamError("perturbation hypothesis needs the second family");
    }

    std::optional<AdjointableOp> root;
    if (predicate == Predicate::perturbation_hypothesis) {
        AdjointableOp prod = ctrl.C().compose(ctrl.C_prime());
        root = op_sqrt((prod + prod.adjoint()).scaled(Complex(0.5, 0.0)));
    }

    Rng rng(seed);
    SampledCheck out;
    out.max_violation = -kInf;
    for (int k = 0; k < n_samples; ++k) {
        ModuleVector f = ModuleVector::random(sys.slot_count(), sys.dim(), rng);
        double violation = -kInf;
        switch (predicate) {
            case Predicate::eq_controlled_order: {
                AlgebraElement sum = frame_sum(sys, ctrl, f);
                AlgebraElement ff = inner_product(f, f);
                for (int s = 0; s < sys.slot_count(); ++s) {
                    double mid = sum[s].real();
                    violation = std::max(violation, inst.A * ff[s].real() - mid);
                    violation = std::max(violation, mid - inst.B * ff[s].real());
                }
                break;
            }
            case Predicate::eq_controlled_norm: {
                double mid = frame_sum(sys, ctrl, f).norm();
                double f2 = f.norm() * f.norm();
                violation = std::max(inst.A * f2 - mid, mid - inst.B * f2);
                break;
            }
            case Predicate::eq_k_order:
            case Predicate::eq_k_norm: {
                ModuleVector kf = inst.K->adjoint().apply(f);
                AlgebraElement sum = frame_sum(sys, ctrl, f);
                AlgebraElement ff = inner_product(f, f);
                AlgebraElement kk = inner_product(kf, kf);
                if (predicate == Predicate::eq_k_order) {
                    for (int s = 0; s < sys.slot_count(); ++s) {
                        double mid = sum[s].real();
                        double lower = std::isfinite(inst.A)
                                           ? inst.A * kk[s].real()
                                           : (kk[s].real() > kAlgebraTol ? kInf : 0.0);
                        violation = std::max(violation, lower - mid);
                        violation = std::max(violation, mid - inst.B * ff[s].real());
                    }
                } else {
                    double mid = sum.norm();
                    double lower = std::isfinite(inst.A)
                                       ? inst.A * kk.norm()
                                       : (kk.norm() > kAlgebraTol ? kInf : 0.0);
                    violation = std::max(lower - mid, mid - inst.B * ff.norm());
                }
                break;
            }
            case Predicate::perturbation_hypothesis: {
                ModuleVector rf = root->apply(f);
                double lhs = difference_norm(sys, *inst.gamma_system, rf);
                double rhs = inst.lambda1 * family_norm(sys, rf) +
                             inst.lambda2 * family_norm(*inst.gamma_system, rf) +
                             inst.epsilon * inst.K->adjoint().apply(f).norm();
                violation = lhs - rhs;
                break;
            }
        }
        if (violation > out.max_violation) {
            out.max_violation = violation;
            if (violation > 1e-9) out.witness = f;
        }
    }
    out.samples = n_samples;
    return out;
}

}  // namespace ccgf::oracle
