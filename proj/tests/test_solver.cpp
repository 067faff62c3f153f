#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ccgf/solver.hpp"

using namespace ccgf;

namespace {

AdjointableOp diag_op(int m, const std::vector<double>& entries) {
    std::vector<Eigen::VectorXcd> d(m, Eigen::VectorXcd::Zero(static_cast<int>(entries.size())));
    for (int s = 0; s < m; ++s)
        for (size_t i = 0; i < entries.size(); ++i) d[s](i) = Complex(entries[i], 0.0);
    return AdjointableOp::diagonal(d);
}

ModuleVector direct_solve(const AdjointableOp& S, const ModuleVector& b) {
    std::vector<Eigen::VectorXcd> slots;
    for (int s = 0; s < S.slot_count(); ++s)
        slots.push_back(S.block(s).partialPivLu().solve(b.slot(s)));
    return ModuleVector(std::move(slots));
}

}  // namespace

TEST_CASE("fixed-step iteration converges with the certified contraction") {
    AdjointableOp S = diag_op(2, {1.0, 2.5, 4.0});
    Rng rng(1);
    ModuleVector b = ModuleVector::random(2, 3, rng);

    auto [x, rep] = richardson_invert(S, b, 1.0, 4.0, 1e-10, 1000);
    CHECK((S.apply(x) - b).norm() <= 1e-10 * b.norm() * 1.01);
    CHECK(rep.method == SolveMethod::richardson);
    CHECK(rep.bound_ratio == doctest::Approx(0.6));
    CHECK(rep.contraction_observed <= rep.bound_ratio + 1e-10);
    REQUIRE(!rep.residual_history.empty());
    CHECK(rep.residual_history.front() == 1.0);
    CHECK(rep.rel_error <= 1e-10);

    // iteration count is governed by the contraction ratio
    int predicted = static_cast<int>(std::ceil(std::log(1e-10) / std::log(0.6)));
    CHECK(rep.iterations <= predicted + 1);
}

TEST_CASE("certificate validation rejects wrong bounds") {
    AdjointableOp S = diag_op(1, {1.0, 4.0});
    Rng rng(2);
    ModuleVector b = ModuleVector::random(1, 2, rng);

    CHECK_THROWS_AS(richardson_invert(S, b, 0.0, 4.0, 1e-8, 100), BoundsError);
    CHECK_THROWS_AS(richardson_invert(S, b, 4.0, 1.0, 1e-8, 100), BoundsError);
    // claimed upper bound below the true spectrum
    CHECK_THROWS_AS(richardson_invert(S, b, 1.0, 2.0, 1e-8, 100), BoundsError);
    // claimed lower bound above the true spectrum
    CHECK_THROWS_AS(richardson_invert(S, b, 2.0, 4.0, 1e-8, 100), BoundsError);

    std::vector<Eigen::MatrixXcd> skew(1, Eigen::MatrixXcd::Zero(2, 2));
    skew[0] << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(richardson_invert(AdjointableOp(skew), b, 0.5, 2.0, 1e-8, 100), BoundsError);
}

TEST_CASE("zero right-hand side returns immediately") {
    AdjointableOp S = diag_op(1, {1.0, 2.0});
    auto [x, rep] = richardson_invert(S, ModuleVector(1, 2), 1.0, 2.0, 1e-8, 100);
    CHECK(x.norm() == 0.0);
    CHECK(rep.iterations == 0);
    CHECK(rep.rel_error == 0.0);
}

TEST_CASE("non-convergence surfaces the partial iterate and its report") {
    AdjointableOp S = diag_op(1, {0.01, 1.0});
    Rng rng(3);
    ModuleVector b = ModuleVector::random(1, 2, rng);
    try {
        richardson_invert(S, b, 0.01, 1.0, 1e-14, 3);
        FAIL("expected a convergence failure");
    } catch (const SolveFailure& e) {
        CHECK(e.report.iterations == 3);
        CHECK(e.report.rel_error > 1e-14);
        CHECK(e.x.norm() > 0.0);
    }
}

TEST_CASE("conjugate gradient is exact within the dimension and checks positivity") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 3 + static_cast<int>(trial % 4);
        std::vector<Eigen::MatrixXcd> blocks(2);
        for (int s = 0; s < 2; ++s) {
            Eigen::MatrixXcd G(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) G(r, c) = rng.cnormal();
            blocks[s] = G * G.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(n, n);
        }
        AdjointableOp S{std::move(blocks)};
        ModuleVector b = ModuleVector::random(2, n, rng);
        auto [x, rep] = cg_invert(S, b, 1e-8, 10 * n + 32);
        CHECK(rep.method == SolveMethod::cg);
        CHECK(rep.iterations <= n);
        CHECK(rep.rel_error <= 1e-8);
        CHECK((x - direct_solve(S, b)).norm() <= 1e-6 * std::max(1.0, x.norm()));
    }

    CHECK_THROWS_AS(cg_invert(diag_op(1, {1.0, -1.0}), ModuleVector(1, 2), 1e-8, 100),
                    PositivityError);
}

TEST_CASE("conjugate gradient decreases the energy error monotonically") {
    Rng rng(5);
    int n = 6;
    std::vector<Eigen::MatrixXcd> blocks(1);
    Eigen::MatrixXcd G(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) G(r, c) = rng.cnormal();
    blocks[0] = G * G.adjoint() + 0.05 * Eigen::MatrixXcd::Identity(n, n);
    AdjointableOp S{std::move(blocks)};
    ModuleVector b = ModuleVector::random(1, n, rng);
    ModuleVector exact = direct_solve(S, b);

    std::vector<double> energies;
    auto observer = [&](int, const ModuleVector& xk) {
        ModuleVector e = xk - exact;
        energies.push_back(inner_product(S.apply(e), e).norm());
    };
    cg_invert(S, b, 1e-12, 200, observer);
    REQUIRE(energies.size() >= 2);
    for (size_t k = 1; k < energies.size(); ++k)
        CHECK(energies[k] <= energies[k - 1] * (1.0 + 1e-9) + 1e-14);
}

TEST_CASE("reconstruction inverts the analysis pipeline for both methods") {
    RandomInstance inst = gen_random(71, 2, 5, 4, GenMode::diagonal, 4.0);
    Rng rng(6);
    ModuleVector f = ModuleVector::random(2, 5, rng);
    CoefficientFamily coeffs = analysis_apply(inst.system, inst.controllers, f);

    for (SolveMethod method : {SolveMethod::richardson, SolveMethod::cg}) {
        auto [x, rep] = reconstruct(inst.system, inst.controllers, coeffs, method, 1e-10);
        CHECK((x - f).norm() <= 1e-8 * f.norm());
        CHECK(rep.rel_error <= 1e-10);
    }

    // a non-frame system is refused up front
    GFusionSystem partial = build_frame_system(
        1, 2,
        {FrameMember{Projector::coordinates(1, 2, {0}), AdjointableOp::identity(1, 2),
                     AlgebraElement::one(1)}});
    ControllerPair id = identity_controllers(partial);
    ModuleVector g = ModuleVector::random(1, 2, rng);
    CHECK_THROWS_AS(reconstruct(partial, id, analysis_apply(partial, id, g),
                                SolveMethod::richardson, 1e-8),
                    BoundsError);
}

TEST_CASE("inverse-controller preconditioning collapses the iteration count") {
    RandomInstance inst = gen_random(81, 2, 5, 4, GenMode::diagonal, 12.0);
    ControllerPair plain = identity_controllers(inst.system);
    AdjointableOp S_plain = frame_operator(inst.system, plain);

    ControllerPair tuned = make_controller_pair(inst.system, op_inverse(S_plain),
                                                AdjointableOp::identity(2, 5));
    REQUIRE(tuned.validated());
    AdjointableOp S_tuned = frame_operator(inst.system, tuned);
    CHECK((S_tuned - AdjointableOp::identity(2, 5)).norm() <= 1e-10);

    ConditioningReport rep = conditioning_report(inst.system, plain, tuned);
    CHECK(rep.kappa_base >= 100.0);
    CHECK(rep.kappa_test <= 1.0 + 1e-9);
    CHECK(rep.iters_base >= 200);
    CHECK(rep.iters_test == 1);
}
