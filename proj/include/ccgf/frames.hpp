#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccgf/module_space.hpp"

namespace ccgf {

/**
 * One member (W_j, Lambda_j, v_j) of a g-fusion system: an orthogonal
 * projector onto the submodule W_j, an adjointable map Lambda_j from the
 * ambient module into A^{n_j}, and a positive invertible weight v_j in A.
 */
struct FrameMember {
    Projector P;
    AdjointableOp Lambda;
    AlgebraElement v;
};

/**
 * GFusionSystem: a finite family of members over A^n with A = C^m.
 * Construction validates shapes and weight positivity; it does not decide
 * whether the family is a frame (that is an assessment).
 */
class GFusionSystem {
public:
    GFusionSystem(int m, int n, std::vector<FrameMember> members);

    int slot_count() const { return m_; }
    int dim() const { return n_; }
    int member_count() const { return static_cast<int>(members_.size()); }
    const FrameMember& member(int j) const { return members_[j]; }
    const std::vector<FrameMember>& members() const { return members_; }
    /// Codomain dimension n_j of member j.
    int codomain_dim(int j) const { return members_[j].Lambda.codomain_dim(); }
    /// True when every member has codomain dimension n_j == dim().
    bool uniform_codomain() const;

private:
    int m_;
    int n_;
    std::vector<FrameMember> members_;
};

/// Validating constructor wrapper; the named entry point for building systems.
GFusionSystem build_frame_system(int m, int n, std::vector<FrameMember> members);

struct CommutationRecord {
    double max_residual_cc = 0.0;       // ||CC' - C'C||
    double max_residual_members = 0.0;  // max_j of commutator norms with Phi_j
    double tol = kCommutationTol;
};

/**
 * ControllerPair: a pair (C, C') in GL+(A^n) together with the outcome of
 * validating, against one system, that C and C' commute with each other and
 * with every Phi_j = P_j Lambda_j* Lambda_j P_j. Unvalidated pairs can be
 * held for diagnostics but every operator-level computation refuses them.
 */
class ControllerPair {
public:
    const AdjointableOp& C() const { return C_; }
    const AdjointableOp& C_prime() const { return Cp_; }
    bool validated() const { return validated_; }
    const CommutationRecord& residuals() const { return record_; }

    friend ControllerPair make_controller_pair(const GFusionSystem& sys, AdjointableOp C,
                                               AdjointableOp Cp, double tol);

private:
    ControllerPair(AdjointableOp C, AdjointableOp Cp, bool validated, CommutationRecord record)
        : C_(std::move(C)), Cp_(std::move(Cp)), validated_(validated), record_(record) {}

    AdjointableOp C_;
    AdjointableOp Cp_;
    bool validated_;
    CommutationRecord record_;
};

/// Checks gl_plus for both controllers (PositivityError otherwise) and runs
/// commutation validation against the system. Never throws on a commutation
/// failure; the returned pair simply carries validated() == false.
ControllerPair make_controller_pair(const GFusionSystem& sys, AdjointableOp C, AdjointableOp Cp,
                                    double tol = kCommutationTol);

/// Identity controllers, validated trivially for the system.
ControllerPair identity_controllers(const GFusionSystem& sys);

/**
 * CoefficientFamily: an element {f_j} of the direct-sum module, f_j in A^{n_j}.
 */
class CoefficientFamily {
public:
    explicit CoefficientFamily(std::vector<ModuleVector> parts);

    int part_count() const { return static_cast<int>(parts_.size()); }
    const ModuleVector& part(int j) const { return parts_[j]; }
    ModuleVector& part(int j) { return parts_[j]; }

    /// <{f_j},{f_j}> = sum_j <f_j,f_j> in A.
    AlgebraElement gram() const;
    /// Direct-sum norm ||{f_j}|| = ||gram()||^(1/2).
    double norm() const;

private:
    std::vector<ModuleVector> parts_;
};

/// Zero coefficient family shaped for the system.
CoefficientFamily zero_coefficients(const GFusionSystem& sys);

/// T({f_j}) = sum_j v_j (CC')^(1/2) P_j Lambda_j* f_j.
ModuleVector synthesis_apply(const GFusionSystem& sys, const ControllerPair& ctrl,
                             const CoefficientFamily& coeffs);

/// T*(g) = { v_j Lambda_j P_j (C'C)^(1/2) g }_j.
CoefficientFamily analysis_apply(const GFusionSystem& sys, const ControllerPair& ctrl,
                                 const ModuleVector& g);

/// S = sum_j v_j^2 C' P_j Lambda_j* Lambda_j P_j C.
AdjointableOp frame_operator(const GFusionSystem& sys, const ControllerPair& ctrl);

/// The synthesis operator as one stacked block n x (sum_j n_j), so its
/// largest singular value is the synthesis norm and T T* is computable
/// without the member loop.
AdjointableOp synthesis_matrix(const GFusionSystem& sys, const ControllerPair& ctrl);

/// Flatten {f_j} into the stacked coordinates used by synthesis_matrix.
ModuleVector stack_coefficients(const CoefficientFamily& coeffs);

struct SlotSpectrum {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct KVerdict {
    double A_K = 0.0;  // +infinity when KK* = 0 (vacuous lower bound)
    bool is_K_frame = false;
};

/**
 * FrameAssessment: the frame operator, optimal bounds A_opt = min slot
 * lambda_min(S_s) and B_opt = max slot lambda_max(S_s), per-slot spectra and
 * verdicts. For an assessment against a lower operator K the K-verdict holds
 * the largest feasible A with A KK* <= S.
 */
struct FrameAssessment {
    AdjointableOp S;
    double A_opt = 0.0;
    double B_opt = 0.0;
    std::vector<SlotSpectrum> per_slot;
    bool is_bessel = false;
    bool is_frame = false;
    bool is_tight = false;
    bool is_parseval = false;
    std::optional<KVerdict> k_verdict;
};

FrameAssessment assess_controlled(const GFusionSystem& sys, const ControllerPair& ctrl,
                                  double tol_verdict = kVerdictTol);

FrameAssessment assess_k_g_fusion(const GFusionSystem& sys, const ControllerPair& ctrl,
                                  const AdjointableOp& K, double tol_verdict = kVerdictTol);

/// sum_j v_j^2 <Lambda_j P_j C f, Lambda_j P_j C' f>, evaluated member by
/// member; equals <Sf, f> for validated controllers (the eq-12 identity).
AlgebraElement frame_sum(const GFusionSystem& sys, const ControllerPair& ctrl,
                         const ModuleVector& f);

/**
 * The worked sequence-space example truncated to A^N: W_j = span{e_j},
 * Lambda_j f = sum_{k=1..j} <f, e_j/sqrt(j)> e_k into A^j, v_j = 1, and
 * scalar controllers C = c_scale I, C' = cp_scale I. With c_scale*cp_scale=1
 * the family is a controlled Parseval g-fusion frame: S = I exactly.
 */
std::pair<GFusionSystem, ControllerPair> gen_paper_example(int N, int m, double c_scale = 2.0,
                                                           double cp_scale = 0.5);

enum class GenMode {
    scalar_ctrl,  // dense random members, scalar controllers (exact commutation)
    diagonal,     // simultaneously diagonal members, controllers and K
};

struct RandomInstance {
    GFusionSystem system;
    ControllerPair controllers;
    AdjointableOp K;
    uint64_t seed;
    GenMode mode;
    double spread;
};

/**
 * Deterministic random instance. scalar_ctrl: dense Gaussian members (member 0
 * spans the module so the family is a frame), random positive weights, scalar
 * controllers, dense K. diagonal: coordinate projectors covering every
 * coordinate, diagonal members/controllers/K; the frame operator is diagonal
 * with per-slot condition number spread^2 pinned (n >= 2), so conditioning is
 * dialed directly by `spread`.
 */
RandomInstance gen_random(uint64_t seed, int m, int n, int J, GenMode mode, double spread);

}  // namespace ccgf
