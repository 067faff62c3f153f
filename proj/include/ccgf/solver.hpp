#pragma once

#include <functional>
#include <vector>

#include "ccgf/frames.hpp"

namespace ccgf {

enum class SolveMethod { richardson, cg };

/**
 * SolveReport: residual_history holds relative Euclidean residuals
 * ||b - S x_k|| / ||b|| including the initial 1.0; the final entry is always
 * the directly recomputed true residual. contraction_observed is the worst
 * per-step ratio of the residual recursion while residuals stay above the
 * roundoff floor (Richardson only; the same matrix drives error and residual
 * contraction). bound_ratio = (B - A)/(B + A) for Richardson, 0 for CG.
 * rel_error is the final true relative residual.
 */
struct SolveReport {
    SolveMethod method = SolveMethod::richardson;
    int iterations = 0;
    std::vector<double> residual_history;
    double contraction_observed = 0.0;
    double bound_ratio = 0.0;
    double rel_error = 0.0;
};

/// ConvergenceError that carries the partial result and its report.
class SolveFailure : public ConvergenceError {
public:
    SolveFailure(const std::string& msg, ModuleVector x, SolveReport report)
        : ConvergenceError(msg), x(std::move(x)), report(std::move(report)) {}

    ModuleVector x;
    SolveReport report;
};

/// Called after every iterate update with (iteration index, current x).
using IterationObserver = std::function<void(int, const ModuleVector&)>;

/// Fixed-step Richardson iteration x <- x + 2/(A+B) (b - S x) from x = 0.
/// The certificate A I <= S <= B I is validated first (BoundsError otherwise),
/// which guarantees per-step contraction (B-A)/(B+A).
std::pair<ModuleVector, SolveReport> richardson_invert(const AdjointableOp& S,
                                                       const ModuleVector& b, double A, double B,
                                                       double tol, int max_iter,
                                                       const IterationObserver& observer = {});

/// Slot-wise conjugate gradient for self-adjoint positive S (PositivityError
/// otherwise); exact in at most dim() steps per slot up to roundoff.
std::pair<ModuleVector, SolveReport> cg_invert(const AdjointableOp& S, const ModuleVector& b,
                                               double tol, int max_iter,
                                               const IterationObserver& observer = {});

/// Synthesize b from the coefficients and invert the frame operator, so a
/// family produced by analysis_apply reconstructs the original vector.
std::pair<ModuleVector, SolveReport> reconstruct(const GFusionSystem& sys,
                                                 const ControllerPair& ctrl,
                                                 const CoefficientFamily& coeffs,
                                                 SolveMethod method, double tol);

struct ConditioningReport {
    double kappa_base = 0.0;
    double kappa_test = 0.0;
    int iters_base = 0;
    int iters_test = 0;
};

/// Contrast of condition number and Richardson iteration count (tol 1e-8, one
/// fixed right-hand side) between two controller choices for one system.
ConditioningReport conditioning_report(const GFusionSystem& sys, const ControllerPair& base,
                                       const ControllerPair& test);

}  // namespace ccgf
