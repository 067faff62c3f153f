#include "ccgf/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccgf/oracle.hpp"

namespace ccgf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Columns of the projector as module vectors; they generate range(P) slot-wise.
std::vector<ModuleVector> projector_columns(const Projector& P) {
    const int m = P.slot_count();
    const int n = P.dim();
    std::vector<ModuleVector> cols;
    cols.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Eigen::VectorXcd> slots(m);
        for (int s = 0; s < m; ++s) slots[s] = P.op().block(s).col(i);
        cols.emplace_back(std::move(slots));
    }
    return cols;
}

/// P_{T W}: projector onto the slot-wise image of W under T.
Projector image_projector(const Projector& W, const AdjointableOp& T) {
    std::vector<ModuleVector> gens = projector_columns(W);
    for (auto& g : gens) g = T.apply(g);
    return projector_from_generators(gens);
}

void require_invariance(const Projector& P, const AdjointableOp& X, const std::string& what) {
    AdjointableOp eye = AdjointableOp::identity(P.slot_count(), P.dim());
    double resid = (eye - P.op()).compose(X).compose(P.op()).norm();
    if (resid > kCommutationTol * (1.0 + X.norm())) {
        throw HypothesisError(what + " (residual " + std::to_string(resid) + ")");
    }
}

void require_commutes(const AdjointableOp& T, const AdjointableOp& S, const std::string& what) {
    CommutationCheck cc = commutes(T, S);
    if (!cc.commute) {
        throw HypothesisError(what + " (residual " + std::to_string(cc.residual) + ")");
    }
}

void require_square_on(const GFusionSystem& sys, const AdjointableOp& T, const std::string& name) {
    if (T.slot_count() != sys.slot_count() || T.domain_dim() != sys.dim() ||
        T.codomain_dim() != sys.dim()) {
        throw DimensionError(name + " must be a square operator on the system module");
    }
}

}  // namespace

TransformResult c2_equivalence(const GFusionSystem& sys, const AdjointableOp& C,
                               C2Direction direction) {
    require_square_on(sys, C, "C");
    ControllerPair plain = identity_controllers(sys);
    ControllerPair doubled = make_controller_pair(sys, C, C);
    AdjointableOp c_inv = op_inverse(C);

    if (direction == C2Direction::to_controlled) {
        FrameAssessment src = assess_controlled(sys, plain);
        double a_pred = src.A_opt / (c_inv.norm() * c_inv.norm());
        double b_pred = src.B_opt * C.norm() * C.norm();
        FrameAssessment measured = assess_controlled(sys, doubled);
        return TransformResult{sys,
                               std::move(doubled),
                               std::nullopt,
                               BoundPrediction{a_pred, b_pred, "c2_to_controlled"},
                               std::move(measured),
                               std::nullopt};
    }

    FrameAssessment src = assess_controlled(sys, doubled);
    AdjointableOp c_sq = C.compose(C);
    double a_pred = src.A_opt / c_sq.norm();  // A' ||(C^-2)^-1||^-1 with (C^-2)^-1 = C^2
    double b_pred = src.B_opt * c_inv.norm() * c_inv.norm();
    FrameAssessment measured = assess_controlled(sys, plain);
    return TransformResult{sys,
                           std::move(plain),
                           std::nullopt,
                           BoundPrediction{a_pred, b_pred, "c2_from_controlled"},
                           std::move(measured),
                           std::nullopt};
}

namespace {

TransformResult theta_compose(const GFusionSystem& sys, const ControllerPair& ctrl,
                              const AdjointableOp& theta, bool left) {
    require_square_on(sys, theta, "theta");
    OpClassification cls = classify(theta);
    if (!cls.bounded_below) {
        throw HypothesisError("theta must be bounded below (injective with closed range)");
    }
    if (left) {
        if (!sys.uniform_codomain()) {
            throw HypothesisError(
                "theta_left requires uniform codomain dimensions n_j == n; the "
                "commutation hypotheses are ill-typed on ragged codomains");
        }
        for (int j = 0; j < sys.member_count(); ++j) {
            const FrameMember& mb = sys.member(j);
            AdjointableOp lpc = mb.Lambda.compose(mb.P.op()).compose(ctrl.C());
            AdjointableOp lpcp = mb.Lambda.compose(mb.P.op()).compose(ctrl.C_prime());
            require_commutes(theta, lpc,
                             "theta must commute with Lambda_j P_j C (member " +
                                 std::to_string(j) + ")");
            require_commutes(theta, lpcp,
                             "theta must commute with Lambda_j P_j C' (member " +
                                 std::to_string(j) + ")");
        }
    } else {
        require_commutes(theta, ctrl.C(), "theta must commute with C");
        require_commutes(theta, ctrl.C_prime(), "theta must commute with C'");
        for (int j = 0; j < sys.member_count(); ++j) {
            require_commutes(theta, sys.member(j).P.op(),
                             "theta must commute with P_j (member " + std::to_string(j) + ")");
        }
    }

    std::vector<FrameMember> members;
    members.reserve(sys.member_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        AdjointableOp lam = left ? theta.compose(mb.Lambda) : mb.Lambda.compose(theta);
        members.push_back(FrameMember{mb.P, std::move(lam), mb.v});
    }
    GFusionSystem out_sys = build_frame_system(sys.slot_count(), sys.dim(), std::move(members));
    ControllerPair out_ctrl = make_controller_pair(out_sys, ctrl.C(), ctrl.C_prime());

    FrameAssessment src = assess_controlled(sys, ctrl);
    AdjointableOp gram_inv = op_inverse(theta.adjoint().compose(theta));
    double a_pred = src.A_opt / gram_inv.norm();
    double b_pred = src.B_opt * theta.norm() * theta.norm();
    FrameAssessment measured = assess_controlled(out_sys, out_ctrl);
    return TransformResult{std::move(out_sys),
                           std::move(out_ctrl),
                           std::nullopt,
                           BoundPrediction{a_pred, b_pred, left ? "theta_left" : "theta_right"},
                           std::move(measured),
                           std::nullopt};
}

}  // namespace

TransformResult theta_right(const GFusionSystem& sys, const ControllerPair& ctrl,
                            const AdjointableOp& theta) {
    return theta_compose(sys, ctrl, theta, false);
}

TransformResult theta_left(const GFusionSystem& sys, const ControllerPair& ctrl,
                           const AdjointableOp& theta) {
    return theta_compose(sys, ctrl, theta, true);
}

TransformResult conjugate_U(const GFusionSystem& sys, const ControllerPair& ctrl,
                            const AdjointableOp& U, const AdjointableOp& K) {
    require_square_on(sys, U, "U");
    require_square_on(sys, K, "K");
    if (!classify(U).invertible) throw HypothesisError("U must be invertible");
    require_commutes(U, ctrl.C(), "U must commute with C");
    require_commutes(U, ctrl.C_prime(), "U must commute with C'");
    AdjointableOp gram = U.adjoint().compose(U);
    for (int j = 0; j < sys.member_count(); ++j) {
        require_invariance(sys.member(j).P, gram,
                           "U*U W_j must lie in W_j (member " + std::to_string(j) + ")");
    }

    double lemma_residual = 0.0;
    std::vector<FrameMember> members;
    members.reserve(sys.member_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        Lemma9Report l9 = lemma9_check(mb.P, U);
        lemma_residual = std::max(lemma_residual, l9.residual);
        members.push_back(FrameMember{image_projector(mb.P, U),
                                      mb.Lambda.compose(mb.P.op()).compose(U.adjoint()), mb.v});
    }
    GFusionSystem out_sys = build_frame_system(sys.slot_count(), sys.dim(), std::move(members));
    ControllerPair out_ctrl = make_controller_pair(out_sys, ctrl.C(), ctrl.C_prime());

    FrameAssessment src = assess_k_g_fusion(sys, ctrl, K);
    double u2 = U.norm() * U.norm();
    double a_pred = src.k_verdict->A_K / u2;
    double b_pred = src.B_opt * u2;
    AdjointableOp k_out = U.compose(K).compose(U.adjoint());
    FrameAssessment measured = assess_k_g_fusion(out_sys, out_ctrl, k_out);
    return TransformResult{std::move(out_sys),
                           std::move(out_ctrl),
                           std::move(k_out),
                           BoundPrediction{a_pred, b_pred, "conjugate_U"},
                           std::move(measured),
                           lemma_residual};
}

TransformResult inverse_conjugate_U(const GFusionSystem& transformed, const ControllerPair& ctrl,
                                    const AdjointableOp& U, const AdjointableOp& K) {
    require_square_on(transformed, U, "U");
    require_square_on(transformed, K, "K");
    if (!classify(U).invertible) throw HypothesisError("U must be invertible");
    require_commutes(U, ctrl.C(), "U must commute with C");
    require_commutes(U, ctrl.C_prime(), "U must commute with C'");
    AdjointableOp u_inv = op_inverse(U);

    std::vector<FrameMember> members;
    members.reserve(transformed.member_count());
    for (int j = 0; j < transformed.member_count(); ++j) {
        const FrameMember& mb = transformed.member(j);
        members.push_back(FrameMember{image_projector(mb.P, u_inv),
                                      mb.Lambda.compose(u_inv.adjoint()), mb.v});
    }
    GFusionSystem out_sys =
        build_frame_system(transformed.slot_count(), transformed.dim(), std::move(members));
    ControllerPair out_ctrl = make_controller_pair(out_sys, ctrl.C(), ctrl.C_prime());

    FrameAssessment src = assess_k_g_fusion(transformed, ctrl, K);
    double a_pred = src.k_verdict->A_K / (U.norm() * U.norm());
    double b_pred = src.B_opt * u_inv.norm() * u_inv.norm();
    AdjointableOp k_out = u_inv.compose(K).compose(U);
    FrameAssessment measured = assess_k_g_fusion(out_sys, out_ctrl, k_out);
    return TransformResult{std::move(out_sys),
                           std::move(out_ctrl),
                           std::move(k_out),
                           BoundPrediction{a_pred, b_pred, "inverse_conjugate_U"},
                           std::move(measured),
                           std::nullopt};
}

TransformResult canonical_K(const GFusionSystem& sys, const ControllerPair& ctrl,
                            const AdjointableOp& K) {
    require_square_on(sys, K, "K");
    if (!classify(K).invertible) {
        throw SingularError("canonical_K requires an invertible K");
    }
    FrameAssessment src = assess_controlled(sys, ctrl);
    AdjointableOp S = src.S;
    AdjointableOp s_inv = op_inverse(S);
    AdjointableOp T = K.compose(s_inv);
    require_commutes(T, ctrl.C(), "K S^-1 must commute with C");
    require_commutes(T, ctrl.C_prime(), "K S^-1 must commute with C'");
    AdjointableOp gram = T.adjoint().compose(T);
    for (int j = 0; j < sys.member_count(); ++j) {
        require_invariance(sys.member(j).P, gram,
                           "(K S^-1)* (K S^-1) W_j must lie in W_j (member " +
                               std::to_string(j) + ")");
    }

    AdjointableOp t_adj = s_inv.compose(K.adjoint());  // (K S^-1)* with S self-adjoint
    std::vector<FrameMember> members;
    members.reserve(sys.member_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        members.push_back(FrameMember{image_projector(mb.P, T),
                                      mb.Lambda.compose(mb.P.op()).compose(t_adj), mb.v});
    }
    GFusionSystem out_sys = build_frame_system(sys.slot_count(), sys.dim(), std::move(members));
    ControllerPair out_ctrl = make_controller_pair(out_sys, ctrl.C(), ctrl.C_prime());

    AdjointableOp s_new = frame_operator(out_sys, out_ctrl);
    AdjointableOp expected = K.compose(s_inv).compose(K.adjoint());
    double residual = (s_new - expected).norm();

    double a_pred = src.A_opt / (src.B_opt * src.B_opt);
    double b_pred = (src.B_opt / (src.A_opt * src.A_opt)) * K.norm() * K.norm();
    FrameAssessment measured = assess_k_g_fusion(out_sys, out_ctrl, K);
    return TransformResult{std::move(out_sys),
                           std::move(out_ctrl),
                           K,
                           BoundPrediction{a_pred, b_pred, "canonical_K"},
                           std::move(measured),
                           residual};
}

BesselPairResult bessel_pair_K(const GFusionSystem& lambda_sys, const GFusionSystem& gamma_sys,
                               const ControllerPair& ctrl) {
    if (lambda_sys.slot_count() != gamma_sys.slot_count() ||
        lambda_sys.dim() != gamma_sys.dim() ||
        lambda_sys.member_count() != gamma_sys.member_count()) {
        throw DimensionError("Bessel pair families must share module and member count");
    }
    for (int j = 0; j < lambda_sys.member_count(); ++j) {
        if (lambda_sys.codomain_dim(j) != gamma_sys.codomain_dim(j)) {
            throw DimensionError("Bessel pair member " + std::to_string(j) +
                                 " has mismatched codomain dimensions");
        }
    }
    ControllerPair gamma_ctrl = make_controller_pair(gamma_sys, ctrl.C(), ctrl.C_prime());

    // K* = T_Gamma T_Lambda*, assembled from the stacked synthesis blocks.
    AdjointableOp synth_gamma = synthesis_matrix(gamma_sys, gamma_ctrl);
    AdjointableOp synth_lambda = synthesis_matrix(lambda_sys, ctrl);
    AdjointableOp k_star = synth_gamma.compose(synth_lambda.adjoint());
    AdjointableOp K = k_star.adjoint();

    FrameAssessment b1 = assess_controlled(lambda_sys, ctrl);
    FrameAssessment b2 = assess_controlled(gamma_sys, gamma_ctrl);
    FrameAssessment lam_measured = assess_k_g_fusion(lambda_sys, ctrl, K);
    FrameAssessment gam_measured = assess_k_g_fusion(gamma_sys, gamma_ctrl, k_star);
    return BesselPairResult{std::move(K), 1.0 / b2.B_opt, 1.0 / b1.B_opt,
                            std::move(lam_measured), std::move(gam_measured)};
}

TransformResult morphism_transport(const GFusionSystem& sys, const ControllerPair& ctrl,
                                   const std::vector<int>& slot_map) {
    if (slot_map.empty()) throw MorphismError("slot map must source at least one target slot");
    for (int src : slot_map) {
        if (src < 0 || src >= sys.slot_count()) {
            throw MorphismError("slot map entry " + std::to_string(src) + " out of range");
        }
    }
    const int mt = static_cast<int>(slot_map.size());

    auto transport_op = [&](const AdjointableOp& T) {
        std::vector<Eigen::MatrixXcd> blocks(mt);
        for (int t = 0; t < mt; ++t) blocks[t] = T.block(slot_map[t]);
        return AdjointableOp(std::move(blocks));
    };
    auto transport_vec = [&](const ModuleVector& f) {
        std::vector<Eigen::VectorXcd> slots(mt);
        for (int t = 0; t < mt; ++t) slots[t] = f.slot(slot_map[t]);
        return ModuleVector(std::move(slots));
    };

    std::vector<FrameMember> members;
    members.reserve(sys.member_count());
    for (int j = 0; j < sys.member_count(); ++j) {
        const FrameMember& mb = sys.member(j);
        std::vector<Complex> w(mt);
        for (int t = 0; t < mt; ++t) w[t] = mb.v[slot_map[t]];
        members.push_back(FrameMember{Projector(transport_op(mb.P.op())),
                                      transport_op(mb.Lambda), AlgebraElement(std::move(w))});
    }
    GFusionSystem out_sys = build_frame_system(mt, sys.dim(), std::move(members));
    ControllerPair out_ctrl =
        make_controller_pair(out_sys, transport_op(ctrl.C()), transport_op(ctrl.C_prime()));

    FrameAssessment src = assess_controlled(sys, ctrl);
    FrameAssessment measured = assess_controlled(out_sys, out_ctrl);

    // <S_B theta f, theta g>_B = phi(<S_A f, g>_A) on unit-normalized samples.
    AdjointableOp s_a = frame_operator(sys, ctrl);
    AdjointableOp s_b = frame_operator(out_sys, out_ctrl);
    Rng rng(7);
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
        ModuleVector f = ModuleVector::random(sys.slot_count(), sys.dim(), rng);
        ModuleVector g = ModuleVector::random(sys.slot_count(), sys.dim(), rng);
        f = f.scaled(Complex(1.0 / f.norm(), 0.0));
        g = g.scaled(Complex(1.0 / g.norm(), 0.0));
        AlgebraElement lhs = inner_product(s_b.apply(transport_vec(f)), transport_vec(g));
        AlgebraElement rhs = inner_product(s_a.apply(f), g);
        for (int t = 0; t < mt; ++t) {
            worst = std::max(worst, std::abs(lhs[t] - rhs[slot_map[t]]));
        }
    }

    return TransformResult{std::move(out_sys),
                           std::move(out_ctrl),
                           std::nullopt,
                           BoundPrediction{src.A_opt, src.B_opt, "morphism_transport"},
                           std::move(measured),
                           worst};
}

Lemma9Report lemma9_check(const Projector& W, const AdjointableOp& T) {
    if (T.slot_count() != W.slot_count() || T.domain_dim() != W.dim() ||
        T.codomain_dim() != W.dim()) {
        throw DimensionError("T must be a square operator on the projector's module");
    }
    if (!classify(T).invertible) throw SingularError("lemma9_check requires invertible T");
    Lemma9Report rep;
    AdjointableOp gram = T.adjoint().compose(T);
    AdjointableOp eye = AdjointableOp::identity(W.slot_count(), W.dim());
    rep.hypothesis_residual = (eye - W.op()).compose(gram).compose(W.op()).norm();
    rep.hypothesis_ok = rep.hypothesis_residual <= kCommutationTol * (1.0 + gram.norm());
    Projector tw = image_projector(W, T);
    AdjointableOp pt = W.op().compose(T.adjoint());
    rep.residual = (pt - pt.compose(tw.op())).norm();
    rep.holds = rep.hypothesis_ok && rep.residual <= 1e-10 * (1.0 + T.norm());
    return rep;
}

PerturbationReport perturbation_check(const GFusionSystem& lambda_sys,
                                      const GFusionSystem& gamma_sys, const ControllerPair& ctrl,
                                      const AdjointableOp& K, double lambda1, double lambda2,
                                      double epsilon, int n_samples, uint64_t seed) {
    if (!(lambda1 > 0.0 && lambda1 < 1.0 && lambda2 > 0.0 && lambda2 < 1.0)) {
        throw ParamError("lambda1 and lambda2 must lie in (0, 1)");
    }
    if (epsilon < 0.0) throw ParamError("epsilon must be >= 0");
    if (n_samples < 1) throw ParamError("n_samples must be >= 1");
    if (lambda_sys.slot_count() != gamma_sys.slot_count() ||
        lambda_sys.dim() != gamma_sys.dim() ||
        lambda_sys.member_count() != gamma_sys.member_count()) {
        throw DimensionError("perturbation families must share module and member count");
    }
    for (int j = 0; j < lambda_sys.member_count(); ++j) {
        if (lambda_sys.codomain_dim(j) != gamma_sys.codomain_dim(j)) {
            throw DimensionError("perturbation member " + std::to_string(j) +
                                 " has mismatched codomain dimensions");
        }
    }
    require_square_on(lambda_sys, K, "K");
    ControllerPair gamma_ctrl = make_controller_pair(gamma_sys, ctrl.C(), ctrl.C_prime());

    FrameAssessment src = assess_k_g_fusion(lambda_sys, ctrl, K);
    const double A = src.k_verdict->A_K;
    const double B = src.B_opt;

    // Sufficient certificate: ||D||_op <= lambda1 sqrt(A_Lambda) +
    // lambda2 sqrt(A_Gamma) + epsilon sigma_min(K*), which implies the
    // hypothesis pointwise via the frame lower bounds.
    AdjointableOp prod = ctrl.C().compose(ctrl.C_prime());
    AdjointableOp root = op_sqrt((prod + prod.adjoint()).scaled(Complex(0.5, 0.0)));
    double d_norm = 0.0;
    {
        const int m = lambda_sys.slot_count();
        const int n = lambda_sys.dim();
        std::vector<Eigen::MatrixXcd> acc(m, Eigen::MatrixXcd::Zero(n, n));
        for (int j = 0; j < lambda_sys.member_count(); ++j) {
            const FrameMember& a = lambda_sys.member(j);
            const FrameMember& b = gamma_sys.member(j);
            AdjointableOp ea = a.Lambda.compose(a.P.op()).compose(root).scaled(a.v);
            AdjointableOp eb = b.Lambda.compose(b.P.op()).compose(root).scaled(b.v);
            AdjointableOp diff = ea - eb;
            for (int s = 0; s < m; ++s) {
                acc[s] += diff.block(s).adjoint() * diff.block(s);
            }
        }
        for (int s = 0; s < m; ++s) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (acc[s] + acc[s].adjoint()),
                                                               Eigen::EigenvaluesOnly);
            d_norm = std::max(d_norm, std::sqrt(std::max(
                                          0.0, es.eigenvalues()(es.eigenvalues().size() - 1))));
        }
    }
    double a_lambda = std::max(0.0, assess_controlled(lambda_sys, ctrl).A_opt);
    double a_gamma = std::max(0.0, assess_controlled(gamma_sys, gamma_ctrl).A_opt);
    double sigma_min_kstar = classify(K).min_gap;  // K and K* share singular values
    double cert_rhs = lambda1 * std::sqrt(a_lambda) + lambda2 * std::sqrt(a_gamma) +
                      epsilon * sigma_min_kstar;

    PerturbationHypothesis hyp;
    hyp.certificate = d_norm <= cert_rhs + 1e-12 * (1.0 + d_norm);

    oracle::PredicateInstance inst;
    inst.system = &lambda_sys;
    inst.ctrl = &ctrl;
    inst.K = &K;
    inst.gamma_system = &gamma_sys;
    inst.lambda1 = lambda1;
    inst.lambda2 = lambda2;
    inst.epsilon = epsilon;
    oracle::SampledCheck sc =
        oracle::sampled_check(oracle::Predicate::perturbation_hypothesis, inst, n_samples, seed);
    hyp.falsified_by_sample = sc.witness.has_value();
    hyp.worst_sample_gap = -sc.max_violation;

    bool gate_ok = std::isinf(A) || epsilon < (1.0 - lambda1) * std::sqrt(std::max(0.0, A));
    PerturbationVerdict verdict = PerturbationVerdict::inconclusive;
    if (hyp.falsified_by_sample) {
        verdict = PerturbationVerdict::falsified;
    } else if (hyp.certificate && gate_ok) {
        verdict = PerturbationVerdict::certified;
    }

    double predicted_lower = 0.0;
    if (gate_ok) {
        double num = (1.0 - lambda1) * std::sqrt(std::max(0.0, A)) - epsilon;
        predicted_lower = (num * num) / ((1.0 + lambda2) * (1.0 + lambda2));
    }
    double up = (lambda1 + 1.0) * std::sqrt(std::max(0.0, B)) + epsilon * K.norm();
    double predicted_upper = (up * up) / ((1.0 - lambda2) * (1.0 - lambda2));

    FrameAssessment measured = assess_k_g_fusion(gamma_sys, gamma_ctrl, K);
    return PerturbationReport{lambda1,  lambda2,         epsilon,
                              hyp,      gate_ok,         verdict,
                              predicted_lower, predicted_upper, std::move(measured)};
}

}  // namespace ccgf
