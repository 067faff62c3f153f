#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ccgf/frames.hpp"

namespace ccgf::oracle {

/**
 * Independent verification route. Everything here assembles its matrices by
 * explicit dense accumulation and extracts eigenvalues with hand-rolled
 * power iteration (plus spectral shifts for the low end), deliberately
 * sharing no decomposition code with the Eigen-backed main path.
 */

struct SlotBound {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct OracleReport {
    double A_oracle = 0.0;
    double B_oracle = 0.0;
    std::vector<SlotBound> per_slot;
};

/// Optimal controlled-frame bounds recomputed from scratch.
OracleReport slotwise_bounds(const GFusionSystem& sys, const ControllerPair& ctrl);

/// Largest A with A KK* <= S, found by bisection over [0, hi] where
/// hi = B_oracle / sigma_min(KK*) + 1; each probe is a positivity check via
/// shifted power iteration. Returns +infinity when KK* vanishes.
double k_bound_bisection(const GFusionSystem& sys, const ControllerPair& ctrl,
                         const AdjointableOp& K, double tol_bisect = 1e-7);

enum class Predicate {
    eq_controlled_order,    // A<f,f> <= sum_j ... <= B<f,f> in the algebra order
    eq_controlled_norm,     // A||f||^2 <= ||sum_j ...|| <= B||f||^2
    eq_k_order,             // A<K*f,K*f> <= sum_j ... <= B<f,f>
    eq_k_norm,              // A||K*f||^2 <= ||sum_j ...|| <= B||f||^2
    perturbation_hypothesis,
};

/// Everything a predicate may need; unused fields stay null.
struct PredicateInstance {
    const GFusionSystem* system = nullptr;
    const ControllerPair* ctrl = nullptr;
    const AdjointableOp* K = nullptr;
    const GFusionSystem* gamma_system = nullptr;  // second family for perturbation
    double A = 0.0;
    double B = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double epsilon = 0.0;
};

struct SampledCheck {
    /// Worst signed violation across samples; positive means the predicate
    /// failed by that margin (absolute, in the algebra/norm scale).
    double max_violation = 0.0;
    /// Witness vector when the violation exceeds 1e-9.
    std::optional<ModuleVector> witness;
    int samples = 0;
};

SampledCheck sampled_check(Predicate predicate, const PredicateInstance& inst, int n_samples,
                           uint64_t seed);

}  // namespace ccgf::oracle
