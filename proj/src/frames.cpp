#include "ccgf/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccgf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_validated(const ControllerPair& ctrl) {
    if (!ctrl.validated()) {
        throw CommutationError("controller pair failed validation (residual " +
                               std::to_string(ctrl.residuals().max_residual_members) +
                               "); operator-level computations refuse it");
    }
}

void require_controller_shape(const GFusionSystem& sys, const ControllerPair& ctrl) {
    if (ctrl.C().slot_count() != sys.slot_count() || ctrl.C().domain_dim() != sys.dim()) {
        throw DimensionError("controller pair does not match the system's module");
    }
}

AdjointableOp hermitian_mean(const AdjointableOp& T) {
    return (T + T.adjoint()).scaled(Complex(0.5, 0.0));
}

/// (CC')^(1/2); the product of validated commuting positives is positive, and
/// symmetrizing first removes the commutation roundoff before the eigensolve.
AdjointableOp sqrt_product(const AdjointableOp& X, const AdjointableOp& Y) {
    return op_sqrt(hermitian_mean(X.compose(Y)));
}

AdjointableOp member_phi(const FrameMember& mb) {
    AdjointableOp LP = mb.Lambda.compose(mb.P.op());
    return LP.adjoint().compose(LP);
}

AlgebraElement weight_squared(const AlgebraElement& v) {
    return v * v.adjoint();
}

}  // namespace

GFusionSystem::GFusionSystem(int m, int n, std::vector<FrameMember> members)
    : m_(m), n_(n), members_(std::move(members)) {
    if (m_ < 1 || n_ < 1) throw DimensionError("system needs m >= 1 and n >= 1");
    if (members_.empty()) throw DimensionError("system needs at least one member");
    for (size_t j = 0; j < members_.size(); ++j) {
        const FrameMember& mb = members_[j];
        const std::string where = "member " + std::to_string(j);
        if (mb.P.slot_count() != m_ || mb.P.dim() != n_) {
            throw DimensionError(where + ": projector does not live on A^n");
        }
        if (mb.Lambda.slot_count() != m_ || mb.Lambda.domain_dim() != n_) {
            throw DimensionError(where + ": Lambda domain mismatch");
        }
        if (mb.v.size() != m_) {
            throw DimensionError(where + ": weight slot count mismatch");
        }
        for (int s = 0; s < m_; ++s) {
            const Complex& w = mb.v[s];
            if (std::abs(w.imag()) > kAlgebraTol || w.real() <= kAlgebraTol) {
                throw WeightError(where + ": weight slot " + std::to_string(s) +
                                  " is not positive invertible");
            }
        }
    }
}

bool GFusionSystem::uniform_codomain() const {
    return std::all_of(members_.begin(), members_.end(),
                       [this](const FrameMember& mb) { return mb.Lambda.codomain_dim() == n_; });
}

GFusionSystem build_frame_system(int m, int n, std::vector<FrameMember> members) {
    return GFusionSystem(m, n, std::move(members));
}

ControllerPair make_controller_pair(const GFusionSystem& sys, AdjointableOp C, AdjointableOp Cp,
                                    double tol) {
    for (const AdjointableOp* op : {&C, &Cp}) {
        if (op->slot_count() != sys.slot_count() || op->domain_dim() != sys.dim() ||
            op->codomain_dim() != sys.dim()) {
            throw DimensionError("controller must be a square operator on the system module");
        }
        OpClassification cls = classify(*op);
        if (!cls.gl_plus) {
            throw PositivityError("controller must be positive invertible (GL+)");
        }
    }
    CommutationRecord rec;
    rec.tol = tol;
    bool ok = true;
    CommutationCheck cc = commutes(C, Cp, tol);
    rec.max_residual_cc = cc.residual;
    ok = ok && cc.commute;
    for (int j = 0; j < sys.member_count(); ++j) {
        AdjointableOp phi = member_phi(sys.member(j));
        CommutationCheck c1 = commutes(C, phi, tol);
        CommutationCheck c2 = commutes(Cp, phi, tol);
        rec.max_residual_members =
            std::max({rec.max_residual_members, c1.residual, c2.residual});
        ok = ok && c1.commute && c2.commute;
    }
    return ControllerPair(std::move(C), std::move(Cp), ok, rec);
}

ControllerPair identity_controllers(const GFusionSystem& sys) {
    return make_controller_pair(sys, AdjointableOp::identity(sys.slot_count(), sys.dim()),
                                AdjointableOp::identity(sys.slot_count(), sys.dim()));
}

CoefficientFamily::CoefficientFamily(std::vector<ModuleVector> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw DimensionError("coefficient family needs at least one part");
    for (const auto& p : parts_) {
        if (p.slot_count() != parts_.front().slot_count()) {
            throw DimensionError("coefficient parts must share the slot count");
        }
    }
}

AlgebraElement CoefficientFamily::gram() const {
    AlgebraElement g = AlgebraElement::zero(parts_.front().slot_count());
    for (const auto& p : parts_) g = g + inner_product(p, p);
    return g;
}

double CoefficientFamily::norm() const { return std::sqrt(gram().norm()); }

CoefficientFamily zero_coefficients(const GFusionSystem& sys) {
    std::vector<ModuleVector> parts;
    parts.reserve(sys.member_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        parts.emplace_back(sys.slot_count(), sys.codomain_dim(j));
    }
    return CoefficientFamily(std::move(parts));
}

ModuleVector synthesis_apply(const GFusionSystem& sys, const ControllerPair& ctrl,
                             const CoefficientFamily& coeffs) {
    require_controller_shape(sys, ctrl);
    require_validated(ctrl);
    if (coeffs.part_count() != sys.member_count()) {
        throw DimensionError("coefficient family has wrong part count");
    }
    AdjointableOp root = sqrt_product(ctrl.C(), ctrl.C_prime());
    ModuleVector out(sys.slot_count(), sys.dim());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        const ModuleVector& fj = coeffs.part(j);
        if (fj.slot_count() != sys.slot_count() || fj.dim() != sys.codomain_dim(j)) {
            throw DimensionError("coefficient part " + std::to_string(j) + " shape mismatch");
        }
        ModuleVector term = root.apply(mb.P.op().apply(mb.Lambda.adjoint().apply(fj)));
        out = out + term.scaled(mb.v);
    }
    return out;
}

CoefficientFamily analysis_apply(const GFusionSystem& sys, const ControllerPair& ctrl,
                                 const ModuleVector& g) {
    require_controller_shape(sys, ctrl);
    require_validated(ctrl);
    if (g.slot_count() != sys.slot_count() || g.dim() != sys.dim()) {
        throw DimensionError("analysis input shape mismatch");
    }
    AdjointableOp root = sqrt_product(ctrl.C_prime(), ctrl.C());
    ModuleVector rg = root.apply(g);
    std::vector<ModuleVector> parts;
    parts.reserve(sys.member_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        parts.push_back(mb.Lambda.apply(mb.P.op().apply(rg)).scaled(mb.v));
    }
    return CoefficientFamily(std::move(parts));
}

AdjointableOp frame_operator(const GFusionSystem& sys, const ControllerPair& ctrl) {
    require_controller_shape(sys, ctrl);
    require_validated(ctrl);
    AdjointableOp S = AdjointableOp::zero(sys.slot_count(), sys.dim(), sys.dim());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        AdjointableOp term =
            ctrl.C_prime().compose(member_phi(mb)).compose(ctrl.C()).scaled(weight_squared(mb.v));
        S = S + term;
    }
    return S;
}

AdjointableOp synthesis_matrix(const GFusionSystem& sys, const ControllerPair& ctrl) {
    require_controller_shape(sys, ctrl);
    require_validated(ctrl);
    AdjointableOp root = sqrt_product(ctrl.C(), ctrl.C_prime());
    int total = 0;
    for (int j = 0; j < sys.member_count(); ++j) total += sys.codomain_dim(j);
    std::vector<Eigen::MatrixXcd> blocks(sys.slot_count(),
                                         Eigen::MatrixXcd::Zero(sys.dim(), total));
    for (int s = 0; s < sys.slot_count(); ++s) {
        int col = 0;
        for (int j = 0; j < sys.member_count(); ++j) {
            const FrameMember& mb = sys.member(j);
            blocks[s].middleCols(col, sys.codomain_dim(j)) =
                mb.v[s] * (root.block(s) * mb.P.op().block(s) * mb.Lambda.block(s).adjoint());
            col += sys.codomain_dim(j);
        }
    }
    return AdjointableOp(std::move(blocks));
}

ModuleVector stack_coefficients(const CoefficientFamily& coeffs) {
    const int m = coeffs.part(0).slot_count();
    int total = 0;
    for (int j = 0; j < coeffs.part_count(); ++j) total += coeffs.part(j).dim();
    std::vector<Eigen::VectorXcd> slots(m, Eigen::VectorXcd::Zero(total));
    for (int s = 0; s < m; ++s) {
        int at = 0;
        for (int j = 0; j < coeffs.part_count(); ++j) {
            slots[s].segment(at, coeffs.part(j).dim()) = coeffs.part(j).slot(s);
            at += coeffs.part(j).dim();
        }
    }
    return ModuleVector(std::move(slots));
}

AlgebraElement frame_sum(const GFusionSystem& sys, const ControllerPair& ctrl,
                         const ModuleVector& f) {
    require_controller_shape(sys, ctrl);
    require_validated(ctrl);
    ModuleVector cf = ctrl.C().apply(f);
    ModuleVector cpf = ctrl.C_prime().apply(f);
    AlgebraElement total = AlgebraElement::zero(sys.slot_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        ModuleVector a = mb.Lambda.apply(mb.P.op().apply(cf));
        ModuleVector b = mb.Lambda.apply(mb.P.op().apply(cpf));
        total = total + weight_squared(mb.v) * inner_product(a, b);
    }
    return total;
}

namespace {

FrameAssessment assess_spectra(const GFusionSystem& sys, const ControllerPair& ctrl,
                               double tol_verdict) {
    AdjointableOp S = frame_operator(sys, ctrl);
    double scale = std::max(1.0, S.norm());
    // Validated residuals can add up across members, hence the J-proportional guard.
    if ((S - S.adjoint()).norm() > (10.0 + sys.member_count()) * kAlgebraTol * scale) {
        throw CommutationError("frame operator is not self-adjoint; controllers unsound");
    }
    FrameAssessment out{hermitian_mean(S)};
    out.per_slot.resize(sys.slot_count());
    double a = kInf;
    double b = -kInf;
    for (int s = 0; s < sys.slot_count(); ++s) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.S.block(s), Eigen::EigenvaluesOnly);
        out.per_slot[s].lambda_min = es.eigenvalues()(0);
        out.per_slot[s].lambda_max = es.eigenvalues()(es.eigenvalues().size() - 1);
        a = std::min(a, out.per_slot[s].lambda_min);
        b = std::max(b, out.per_slot[s].lambda_max);
    }
    out.A_opt = a;
    out.B_opt = b;
    out.is_bessel = true;  // finite families are always Bessel
    out.is_frame = a > kAlgebraTol;
    double vt = tol_verdict * std::max(1.0, b);
    out.is_tight = out.is_frame && (b - a) <= vt;
    out.is_parseval = out.is_tight && std::abs(a - 1.0) <= vt && std::abs(b - 1.0) <= vt;
    return out;
}

}  // namespace

FrameAssessment assess_controlled(const GFusionSystem& sys, const ControllerPair& ctrl,
                                  double tol_verdict) {
    return assess_spectra(sys, ctrl, tol_verdict);
}

FrameAssessment assess_k_g_fusion(const GFusionSystem& sys, const ControllerPair& ctrl,
                                  const AdjointableOp& K, double tol_verdict) {
    if (K.slot_count() != sys.slot_count() || K.domain_dim() != sys.dim() ||
        K.codomain_dim() != sys.dim()) {
        throw DimensionError("K must be a square operator on the system module");
    }
    FrameAssessment out = assess_spectra(sys, ctrl, tol_verdict);
    KVerdict kv;
    double a_k = kInf;
    for (int s = 0; s < sys.slot_count(); ++s) {
        Eigen::MatrixXcd KK = K.block(s) * K.block(s).adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.S.block(s));
        const Eigen::VectorXd& d = es.eigenvalues();
        double lmax = d(d.size() - 1);
        double floor = kAlgebraTol * std::max(1.0, lmax);
        // Range condition: KK* must vanish on the numerical kernel of S.
        bool range_ok = true;
        Eigen::VectorXd inv_root = Eigen::VectorXd::Zero(d.size());
        for (int i = 0; i < d.size(); ++i) {
            if (d(i) <= floor) {
                double leak = (KK * es.eigenvectors().col(i)).norm();
                if (leak > kAlgebraTol * std::max(1.0, KK.norm())) range_ok = false;
            } else {
                inv_root(i) = 1.0 / std::sqrt(d(i));
            }
        }
        if (!range_ok) {
            a_k = 0.0;
            continue;
        }
        Eigen::MatrixXcd R = es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().adjoint();
        Eigen::MatrixXcd M = R * KK * R;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(0.5 * (M + M.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        double top = em.eigenvalues()(em.eigenvalues().size() - 1);
        a_k = std::min(a_k, top > 0.0 ? 1.0 / top : kInf);
    }
    kv.A_K = a_k;
    kv.is_K_frame = out.is_bessel && a_k > kAlgebraTol;
    out.k_verdict = kv;
    return out;
}

std::pair<GFusionSystem, ControllerPair> gen_paper_example(int N, int m, double c_scale,
                                                           double cp_scale) {
    if (N < 1 || m < 1) throw ParamError("paper example needs N >= 1 and m >= 1");
    if (c_scale <= 0.0 || cp_scale <= 0.0) throw ParamError("controller scales must be positive");
    std::vector<FrameMember> members;
    members.reserve(N);
    for (int j = 1; j <= N; ++j) {
        Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(j, N);
        double inv_root = 1.0 / std::sqrt(static_cast<double>(j));
        for (int k = 0; k < j; ++k) L(k, j - 1) = Complex(inv_root, 0.0);
        members.push_back(FrameMember{
            Projector::coordinates(m, N, {j - 1}),
            AdjointableOp(std::vector<Eigen::MatrixXcd>(m, L)),
            AlgebraElement::one(m),
        });
    }
    GFusionSystem sys = build_frame_system(m, N, std::move(members));
    ControllerPair ctrl =
        make_controller_pair(sys, AdjointableOp::scalar(m, N, Complex(c_scale, 0.0)),
                             AdjointableOp::scalar(m, N, Complex(cp_scale, 0.0)));
    return {std::move(sys), std::move(ctrl)};
}

namespace {

AlgebraElement random_weight(Rng& rng, int m, double lo, double hi) {
    std::vector<double> w(m);
    for (double& x : w) x = rng.uniform(lo, hi);
    return AlgebraElement::from_real(w);
}

RandomInstance gen_scalar_ctrl(uint64_t seed, Rng& rng, int m, int n, int J, double spread) {
    std::vector<FrameMember> members;
    members.reserve(J);
    for (int j = 0; j < J; ++j) {
        int nj = (j == 0) ? n : rng.uniform_int(1, n);
        std::vector<Eigen::MatrixXcd> blocks(m);
        for (int s = 0; s < m; ++s) {
            Eigen::MatrixXcd L(nj, n);
            for (int r = 0; r < nj; ++r)
                for (int c = 0; c < n; ++c) L(r, c) = rng.cnormal();
            blocks[s] = L;
        }
        Projector P = Projector::identity(m, n);
        if (j > 0) {
            int gens = rng.uniform_int(1, n);
            std::vector<ModuleVector> G;
            G.reserve(gens);
            for (int g = 0; g < gens; ++g) G.push_back(ModuleVector::random(m, n, rng));
            P = projector_from_generators(G);
        }
        members.push_back(FrameMember{std::move(P), AdjointableOp(std::move(blocks)),
                                      random_weight(rng, m, 0.6, 1.6)});
    }
    GFusionSystem sys = build_frame_system(m, n, std::move(members));
    double alpha = rng.log_uniform(1.0 / spread, spread);
    double beta = rng.log_uniform(1.0 / spread, spread);
    ControllerPair ctrl =
        make_controller_pair(sys, AdjointableOp::scalar(m, n, Complex(alpha, 0.0)),
                             AdjointableOp::scalar(m, n, Complex(beta, 0.0)));
    // K: dense Gaussian, redrawn deterministically until comfortably invertible.
    AdjointableOp K = AdjointableOp::identity(m, n);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<Eigen::MatrixXcd> kb(m);
        for (int s = 0; s < m; ++s) {
            Eigen::MatrixXcd B(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) B(r, c) = rng.cnormal();
            kb[s] = B;
        }
        AdjointableOp cand(std::move(kb));
        if (classify(cand).min_gap > 0.15) {
            K = std::move(cand);
            break;
        }
    }
    return RandomInstance{std::move(sys), std::move(ctrl), std::move(K),
                          seed, GenMode::scalar_ctrl, spread};
}

RandomInstance gen_diagonal(uint64_t seed, Rng& rng, int m, int n, int J, double spread) {
    // Coordinate cover: base assignment guarantees every coordinate is hit and
    // every member is nonempty.
    std::vector<std::vector<int>> coords(J);
    for (int i = 0; i < n; ++i) coords[i % J].push_back(i);
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < n; ++i) {
            bool has = std::find(coords[j].begin(), coords[j].end(), i) != coords[j].end();
            if (!has && rng.uniform() < 0.3) coords[j].push_back(i);
        }
        if (coords[j].empty()) coords[j].push_back(rng.uniform_int(0, n - 1));
        std::sort(coords[j].begin(), coords[j].end());
    }

    // Target frame-operator diagonal d[s][i]: log-uniform in [1/spread, spread],
    // first and last coordinate pinned so kappa(S_s) = spread^2 exactly.
    std::vector<std::vector<double>> d(m, std::vector<double>(n));
    for (int s = 0; s < m; ++s) {
        for (int i = 0; i < n; ++i) d[s][i] = rng.log_uniform(1.0 / spread, spread);
        if (n >= 2) {
            d[s][0] = 1.0 / spread;
            d[s][n - 1] = spread;
        }
    }

    double qroot = std::pow(spread, 0.25);
    std::vector<Eigen::VectorXcd> cdiag(m), cpdiag(m), kdiag(m);
    for (int s = 0; s < m; ++s) {
        cdiag[s] = Eigen::VectorXcd(n);
        cpdiag[s] = Eigen::VectorXcd(n);
        kdiag[s] = Eigen::VectorXcd(n);
        for (int i = 0; i < n; ++i) {
            cdiag[s](i) = Complex(rng.log_uniform(1.0 / qroot, qroot), 0.0);
            cpdiag[s](i) = Complex(rng.log_uniform(1.0 / qroot, qroot), 0.0);
            kdiag[s](i) = rng.log_uniform(0.5, 2.0) * rng.phase();
        }
    }

    std::vector<AlgebraElement> weights;
    weights.reserve(J);
    for (int j = 0; j < J; ++j) weights.push_back(random_weight(rng, m, 0.7, 1.4));

    // Convex split of each coordinate's target across its covering members.
    std::vector<std::vector<double>> w(J, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int j = 0; j < J; ++j) {
            if (std::find(coords[j].begin(), coords[j].end(), i) != coords[j].end()) {
                w[j][i] = rng.uniform(0.2, 1.0);
                total += w[j][i];
            }
        }
        for (int j = 0; j < J; ++j) w[j][i] /= total;
    }

    std::vector<FrameMember> members;
    members.reserve(J);
    for (int j = 0; j < J; ++j) {
        std::vector<Eigen::VectorXcd> diag(m, Eigen::VectorXcd::Zero(n));
        for (int s = 0; s < m; ++s) {
            for (int i : coords[j]) {
                double vj = weights[j][s].real();
                double mag2 = w[j][i] * d[s][i] /
                              (cdiag[s](i).real() * cpdiag[s](i).real() * vj * vj);
                diag[s](i) = std::sqrt(mag2) * rng.phase();
            }
        }
        members.push_back(FrameMember{Projector::coordinates(m, n, coords[j]),
                                      AdjointableOp::diagonal(diag), weights[j]});
    }
    GFusionSystem sys = build_frame_system(m, n, std::move(members));
    ControllerPair ctrl = make_controller_pair(sys, AdjointableOp::diagonal(cdiag),
                                               AdjointableOp::diagonal(cpdiag));
    return RandomInstance{std::move(sys), std::move(ctrl), AdjointableOp::diagonal(kdiag),
                          seed, GenMode::diagonal, spread};
}

}  // namespace

RandomInstance gen_random(uint64_t seed, int m, int n, int J, GenMode mode, double spread) {
    if (m < 1 || n < 1 || J < 1) throw ParamError("gen_random needs m, n, J >= 1");
    if (spread < 1.0) throw ParamError("spread must be >= 1");
    Rng rng(seed);
    if (mode == GenMode::scalar_ctrl) return gen_scalar_ctrl(seed, rng, m, n, J, spread);
    return gen_diagonal(seed, rng, m, n, J, spread);
}

}  // namespace ccgf
