#pragma once

#include <string>

#include "ccgf/frames.hpp"

namespace ccgf {

struct BoundPrediction {
    double A_pred = 0.0;
    double B_pred = 0.0;
    std::string formula_id;
};

/**
 * TransformResult: a constructed system with its controllers, the bound
 * prediction quoted by the theorem that built it, and the measured
 * assessment. When K_out is set, the measured lower bound to compare against
 * A_pred is measured.k_verdict->A_K; otherwise it is measured.A_opt.
 * identity_residual carries the operator identity some constructions assert
 * (canonical frame operator, morphism intertwining).
 */
struct TransformResult {
    GFusionSystem system;
    ControllerPair controllers;
    std::optional<AdjointableOp> K_out;
    BoundPrediction predicted;
    FrameAssessment measured;
    std::optional<double> identity_residual;
};

enum class C2Direction { to_controlled, from_controlled };

/**
 * The C^2-controller equivalence: a plain g-fusion frame with bounds (A, B)
 * is a (C^2-style) (C, C)-controlled frame with bounds
 * (A ||C^-1||^-2, B ||C||^2), and conversely a (C, C)-controlled frame with
 * bounds (A', B') is a plain frame with bounds (A' ||(C^-2)^-1||^-1,
 * B' ||C^-1||^2). `direction` picks which side is measured.
 */
TransformResult c2_equivalence(const GFusionSystem& sys, const AdjointableOp& C,
                               C2Direction direction);

/// Right composition {W_j, Lambda_j theta, v_j} for theta bounded below that
/// commutes with C, C' and every P_j. Bounds (A ||(theta* theta)^-1||^-1,
/// B ||theta||^2).
TransformResult theta_right(const GFusionSystem& sys, const ControllerPair& ctrl,
                            const AdjointableOp& theta);

/// Left composition {W_j, theta Lambda_j, v_j}; requires uniform codomain
/// dimensions n_j == n (the commutation hypotheses are ill-typed otherwise).
/// Same bound formulas as theta_right.
TransformResult theta_left(const GFusionSystem& sys, const ControllerPair& ctrl,
                           const AdjointableOp& theta);

/// Conjugation by invertible U with U*U W_j in W_j and U commuting with C and
/// C': {UW_j, Lambda_j P_j U*, v_j} is a controlled UKU*-g-fusion frame with
/// bounds (A_K / ||U||^2, B ||U||^2).
TransformResult conjugate_U(const GFusionSystem& sys, const ControllerPair& ctrl,
                            const AdjointableOp& U, const AdjointableOp& K);

/// Inverse direction: from the conjugated family {UW_j, M_j, v_j} recover
/// {U^-1(UW_j), M_j U^-*, v_j} as a controlled U^-1 K U-g-fusion frame with
/// bounds (A_K / ||U||^2, B ||U^-1||^2).
TransformResult inverse_conjugate_U(const GFusionSystem& transformed, const ControllerPair& ctrl,
                                    const AdjointableOp& U, const AdjointableOp& K);

/// Canonical family {K S^-1 W_j, Lambda_j P_j S^-1 K*, v_j} for invertible K
/// with T = K S^-1 satisfying T*T W_j in W_j and commuting with C, C'. Its
/// frame operator is K S^-1 K* (identity_residual reports the gap) and the
/// bounds are (A / B^2, (B / A^2) ||K||^2).
TransformResult canonical_K(const GFusionSystem& sys, const ControllerPair& ctrl,
                            const AdjointableOp& K);

struct BesselPairResult {
    AdjointableOp K;        // the operator with T_Gamma T_Lambda* = K*
    double lower_lambda;    // Lambda is a K-frame with this lower bound (1/B_Gamma)
    double lower_gamma;     // Gamma is a K*-frame with this lower bound (1/B_Lambda)
    FrameAssessment lambda_measured;
    FrameAssessment gamma_measured;
};

/// Two Bessel families with conformable codomains induce K* = T_Gamma T_Lambda*;
/// Lambda is then a controlled K-g-fusion frame and Gamma a controlled
/// K*-g-fusion frame with the quoted lower bounds.
BesselPairResult bessel_pair_K(const GFusionSystem& lambda_sys, const GFusionSystem& gamma_sys,
                               const ControllerPair& ctrl);

/// Transport along the *-homomorphism phi(a)_t = a[slot_map[t]] and the
/// module map theta(f)[t] = f[slot_map[t]]. Every target slot must name one
/// in-range source slot (MorphismError otherwise). Frame bounds transport
/// verbatim; identity_residual reports the worst sampled gap in
/// <S_B theta f, theta g>_B = phi(<S_A f, g>_A).
TransformResult morphism_transport(const GFusionSystem& sys, const ControllerPair& ctrl,
                                   const std::vector<int>& slot_map);

struct Lemma9Report {
    bool hypothesis_ok = false;   // T*T W in W
    double hypothesis_residual = 0.0;
    bool holds = false;           // P_W T* = P_W T* P_{TW} within 1e-10
    double residual = 0.0;
};

/// Checks the projection identity P_W T* = P_W T* P_{TW} for invertible T
/// under the invariance hypothesis T*T W in W.
Lemma9Report lemma9_check(const Projector& W, const AdjointableOp& T);

enum class PerturbationVerdict { certified, inconclusive, falsified };

struct PerturbationHypothesis {
    bool certificate = false;        // sufficient operator-norm certificate passed
    bool falsified_by_sample = false;
    double worst_sample_gap = 0.0;   // min over samples of rhs - lhs (negative = violated)
};

struct PerturbationReport {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double epsilon = 0.0;
    PerturbationHypothesis hypothesis;
    bool gate_ok = false;  // epsilon < (1 - lambda1) sqrt(A)
    PerturbationVerdict verdict = PerturbationVerdict::inconclusive;
    double predicted_lower = 0.0;  // ((1-l1) sqrt(A) - eps)^2 / (1+l2)^2, when gate_ok
    double predicted_upper = 0.0;  // ((l1+1) sqrt(B) + eps ||K||)^2 / (1-l2)^2
    FrameAssessment measured;      // gamma family assessed against K
};

/**
 * Perturbation stability: if Lambda is a controlled K-g-fusion frame with
 * bounds (A, B) and the family difference obeys the mixed bound with
 * parameters (lambda1, lambda2, epsilon), the perturbed family is a
 * controlled K-g-fusion frame with the predicted bounds. The universally
 * quantified hypothesis is decided by a sufficient operator certificate plus
 * sampled falsification; `verdict` reports certified / inconclusive /
 * falsified and inconclusive is never upgraded.
 */
PerturbationReport perturbation_check(const GFusionSystem& lambda_sys,
                                      const GFusionSystem& gamma_sys, const ControllerPair& ctrl,
                                      const AdjointableOp& K, double lambda1, double lambda2,
                                      double epsilon, int n_samples, uint64_t seed = 2026);

}  // namespace ccgf
