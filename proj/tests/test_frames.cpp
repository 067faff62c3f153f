#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ccgf/frames.hpp"

using namespace ccgf;

namespace {

// One member spanning the whole module: P = I, Lambda = I, v = 1.
FrameMember full_member(int m, int n) {
    return FrameMember{Projector::identity(m, n), AdjointableOp::identity(m, n),
                       AlgebraElement::one(m)};
}

AdjointableOp dense_positive(int m, int n, double offdiag) {
    std::vector<Eigen::MatrixXcd> blocks(m, Eigen::MatrixXcd::Identity(n, n));
    for (int s = 0; s < m; ++s) {
        blocks[s](0, 0) = 2.0;
        blocks[s](0, 1) = offdiag;
        blocks[s](1, 0) = offdiag;
    }
    return AdjointableOp(std::move(blocks));
}

}  // namespace

TEST_CASE("system construction validates shapes and weights") {
    CHECK_NOTHROW(build_frame_system(2, 3, {full_member(2, 3)}));

    // Lambda with the wrong domain dimension
    std::vector<FrameMember> bad_shape;
    bad_shape.push_back(FrameMember{Projector::identity(2, 3), AdjointableOp::identity(2, 4),
                                    AlgebraElement::one(2)});
    CHECK_THROWS_AS(build_frame_system(2, 3, std::move(bad_shape)), DimensionError);

    // a weight with a non-positive slot
    std::vector<FrameMember> bad_weight;
    bad_weight.push_back(FrameMember{Projector::identity(2, 3), AdjointableOp::identity(2, 3),
                                     AlgebraElement(std::vector<Complex>{{1.0, 0.0}, {0.0, 0.0}})});
    CHECK_THROWS_AS(build_frame_system(2, 3, std::move(bad_weight)), WeightError);

    CHECK_THROWS_AS(build_frame_system(2, 3, {}), DimensionError);
}

TEST_CASE("controller pairs: positivity is required, commutation is validated") {
    GFusionSystem sys = build_frame_system(1, 2,
                                           {FrameMember{Projector::coordinates(1, 2, {0}),
                                                        AdjointableOp::identity(1, 2),
                                                        AlgebraElement::one(1)}});

    // non-positive and non-invertible candidates are refused outright
    std::vector<Eigen::VectorXcd> neg(1, Eigen::VectorXcd::Zero(2));
    neg[0] << Complex(1.0, 0.0), Complex(-1.0, 0.0);
    CHECK_THROWS_AS(make_controller_pair(sys, AdjointableOp::diagonal(neg),
                                         AdjointableOp::identity(1, 2)),
                    PositivityError);
    std::vector<Eigen::VectorXcd> sing(1, Eigen::VectorXcd::Zero(2));
    sing[0] << Complex(1.0, 0.0), Complex(0.0, 0.0);
    CHECK_THROWS_AS(make_controller_pair(sys, AdjointableOp::identity(1, 2),
                                         AdjointableOp::diagonal(sing)),
                    PositivityError);

    // a positive pair that fails to commute with the members is constructible
    // but flagged, and operator-level computations refuse it
    ControllerPair bad = make_controller_pair(sys, dense_positive(1, 2, 0.3),
                                              AdjointableOp::identity(1, 2));
    CHECK_FALSE(bad.validated());
    CHECK(bad.residuals().max_residual_members > kCommutationTol);
    CHECK_THROWS_AS(frame_operator(sys, bad), CommutationError);
    CHECK_THROWS_AS(assess_controlled(sys, bad), CommutationError);

    ControllerPair good = identity_controllers(sys);
    CHECK(good.validated());
    CHECK(good.residuals().max_residual_cc == 0.0);
    CHECK(good.residuals().max_residual_members == 0.0);
}

TEST_CASE("synthesis and analysis are adjoint to each other") {
    RandomInstance inst = gen_random(31, 2, 4, 3, GenMode::scalar_ctrl, 3.0);
    Rng rng(77);
    CoefficientFamily c = analysis_apply(inst.system, inst.controllers,
                                         ModuleVector::random(2, 4, rng));
    ModuleVector g = ModuleVector::random(2, 4, rng);

    AlgebraElement lhs = inner_product(synthesis_apply(inst.system, inst.controllers, c), g);
    CoefficientFamily tg = analysis_apply(inst.system, inst.controllers, g);
    AlgebraElement rhs = AlgebraElement::zero(2);
    for (int j = 0; j < c.part_count(); ++j) rhs = rhs + inner_product(c.part(j), tg.part(j));
    CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("frame operator factors through the stacked synthesis matrix") {
    for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        RandomInstance inst = gen_random(seed, 2, 4, 4,
                                         seed % 2 ? GenMode::diagonal : GenMode::scalar_ctrl, 4.0);
        AdjointableOp S = frame_operator(inst.system, inst.controllers);
        AdjointableOp T = synthesis_matrix(inst.system, inst.controllers);
        CHECK((S - T.compose(T.adjoint())).norm() < 1e-10);

        // applying the stacked matrix to stacked coefficients equals synthesis
        Rng rng(seed);
        ModuleVector f = ModuleVector::random(2, 4, rng);
        CoefficientFamily c = analysis_apply(inst.system, inst.controllers, f);
        ModuleVector via_matrix = T.apply(stack_coefficients(c));
        ModuleVector direct = synthesis_apply(inst.system, inst.controllers, c);
        CHECK((via_matrix - direct).norm() < 1e-10);

        // and the synthesis norm is within the Bessel bound
        FrameAssessment as = assess_controlled(inst.system, inst.controllers);
        CHECK(T.norm() <= std::sqrt(as.B_opt) + 1e-8);
    }
}

TEST_CASE("the weighted local sums equal the frame operator quadratic form") {
    RandomInstance inst = gen_random(17, 3, 5, 6, GenMode::diagonal, 5.0);
    AdjointableOp S = frame_operator(inst.system, inst.controllers);
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        ModuleVector f = ModuleVector::random(3, 5, rng);
        AlgebraElement via_sum = frame_sum(inst.system, inst.controllers, f);
        AlgebraElement via_operator = inner_product(S.apply(f), f);
        CHECK((via_sum - via_operator).norm() < 1e-10 * std::max(1.0, via_operator.norm()));
    }
}

TEST_CASE("analytic example is a controlled Parseval frame") {
    for (int m : {1, 2}) {
        auto [sys, ctrl] = gen_paper_example(8, m);
        FrameAssessment as = assess_controlled(sys, ctrl);
        CHECK((as.S - AdjointableOp::identity(m, 8)).norm() <= 1e-12);
        CHECK(as.A_opt == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(as.B_opt == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(as.is_frame);
        CHECK(as.is_tight);
        CHECK(as.is_parseval);
    }
    // any controller scaling with c * c' = 1 keeps it Parseval
    auto [sys4, ctrl4] = gen_paper_example(6, 1, 4.0, 0.25);
    CHECK(assess_controlled(sys4, ctrl4).is_parseval);
}

TEST_CASE("generated diagonal instances pin the conditioning dial") {
    for (double spread : {2.0, 10.0}) {
        RandomInstance inst = gen_random(99, 2, 4, 3, GenMode::diagonal, spread);
        FrameAssessment as = assess_controlled(inst.system, inst.controllers);
        CHECK(as.A_opt == doctest::Approx(1.0 / spread).epsilon(1e-9));
        CHECK(as.B_opt == doctest::Approx(spread).epsilon(1e-9));
        CHECK(as.is_frame);
        // the frame operator is exactly diagonal here
        double offdiag = 0.0;
        for (int s = 0; s < 2; ++s) {
            Eigen::MatrixXcd block = as.S.block(s);
            offdiag = std::max(offdiag,
                               (block - block.diagonal().asDiagonal().toDenseMatrix()).norm());
        }
        CHECK(offdiag == 0.0);
    }
}

TEST_CASE("generated scalar-controller instances are frames with exact commutation") {
    RandomInstance inst = gen_random(123, 2, 5, 4, GenMode::scalar_ctrl, 4.0);
    CHECK(inst.controllers.validated());
    CHECK(inst.controllers.residuals().max_residual_members == 0.0);
    FrameAssessment as = assess_controlled(inst.system, inst.controllers);
    CHECK(as.is_frame);
    CHECK(as.A_opt > kAlgebraTol);
}

TEST_CASE("K-frame verdicts: identity, zero and range-deficient K") {
    RandomInstance inst = gen_random(55, 2, 4, 3, GenMode::diagonal, 6.0);
    FrameAssessment plain = assess_controlled(inst.system, inst.controllers);

    // K = I: the best K-bound is the plain lower bound
    FrameAssessment kid = assess_k_g_fusion(inst.system, inst.controllers,
                                            AdjointableOp::identity(2, 4));
    REQUIRE(kid.k_verdict.has_value());
    CHECK(kid.k_verdict->A_K == doctest::Approx(plain.A_opt).epsilon(1e-9));
    CHECK(kid.k_verdict->is_K_frame);

    // K = 0: the lower condition is vacuous
    FrameAssessment kzero = assess_k_g_fusion(inst.system, inst.controllers,
                                              AdjointableOp::zero(2, 4, 4));
    CHECK(std::isinf(kzero.k_verdict->A_K));
    CHECK(kzero.k_verdict->is_K_frame);

    // a singular frame operator: K reaching outside its range gets A_K = 0,
    // K inside the range still gets a positive verdict
    GFusionSystem partial = build_frame_system(
        1, 2,
        {FrameMember{Projector::coordinates(1, 2, {0}), AdjointableOp::identity(1, 2),
                     AlgebraElement::one(1)}});
    ControllerPair id = identity_controllers(partial);
    CHECK_FALSE(assess_controlled(partial, id).is_frame);

    FrameAssessment leak = assess_k_g_fusion(partial, id, AdjointableOp::identity(1, 2));
    CHECK(leak.k_verdict->A_K == 0.0);
    CHECK_FALSE(leak.k_verdict->is_K_frame);

    std::vector<Eigen::VectorXcd> e00(1, Eigen::VectorXcd::Zero(2));
    e00[0] << Complex(1.0, 0.0), Complex(0.0, 0.0);
    FrameAssessment inside = assess_k_g_fusion(partial, id, AdjointableOp::diagonal(e00));
    CHECK(inside.k_verdict->A_K == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inside.k_verdict->is_K_frame);
}

TEST_CASE("generator rejects invalid parameters") {
    CHECK_THROWS_AS(gen_random(1, 0, 4, 3, GenMode::diagonal, 2.0), ParamError);
    CHECK_THROWS_AS(gen_random(1, 2, 4, 0, GenMode::diagonal, 2.0), ParamError);
    CHECK_THROWS_AS(gen_random(1, 2, 4, 3, GenMode::diagonal, 0.5), ParamError);
}
