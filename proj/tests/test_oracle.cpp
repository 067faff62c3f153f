#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ccgf/oracle.hpp"

using namespace ccgf;

TEST_CASE("independent bounds match the dialed-in diagonal spectrum") {
    RandomInstance inst = gen_random(5, 2, 4, 3, GenMode::diagonal, 8.0);
    oracle::OracleReport rep = oracle::slotwise_bounds(inst.system, inst.controllers);
    CHECK(rep.A_oracle == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
    CHECK(rep.B_oracle == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(rep.per_slot.size() == 2);
}

TEST_CASE("oracle and main path agree on random instances") {
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        GenMode mode = seed % 2 ? GenMode::scalar_ctrl : GenMode::diagonal;
        RandomInstance inst = gen_random(seed, 1 + seed % 3, 3 + seed % 3, 2 + seed % 4, mode,
                                         3.0);
        FrameAssessment as = assess_controlled(inst.system, inst.controllers);
        oracle::OracleReport rep = oracle::slotwise_bounds(inst.system, inst.controllers);
        CHECK(std::abs(as.A_opt - rep.A_oracle) <= 1e-9 * std::max(1.0, as.A_opt));
        CHECK(std::abs(as.B_opt - rep.B_oracle) <= 1e-9 * std::max(1.0, as.B_opt));
    }
}

TEST_CASE("bisection recovers the closed-form K-bound") {
    for (uint64_t seed : {3ULL, 9ULL, 27ULL}) {
        RandomInstance inst = gen_random(seed, 2, 4, 3, GenMode::diagonal, 5.0);
        FrameAssessment as = assess_k_g_fusion(inst.system, inst.controllers, inst.K);
        double bisect = oracle::k_bound_bisection(inst.system, inst.controllers, inst.K);
        CHECK(std::abs(as.k_verdict->A_K - bisect) <=
              1e-6 * std::max(1.0, as.k_verdict->A_K));
    }

    // K = 0 makes the lower condition vacuous in both routes
    RandomInstance inst = gen_random(16, 2, 4, 3, GenMode::diagonal, 5.0);
    CHECK(std::isinf(
        oracle::k_bound_bisection(inst.system, inst.controllers, AdjointableOp::zero(2, 4, 4))));
}

TEST_CASE("sampling finds no witness against assessed constants") {
    RandomInstance inst = gen_random(31, 2, 4, 4, GenMode::scalar_ctrl, 3.0);
    FrameAssessment as = assess_controlled(inst.system, inst.controllers);

    oracle::PredicateInstance pi;
    pi.system = &inst.system;
    pi.ctrl = &inst.controllers;
    pi.A = as.A_opt;
    pi.B = as.B_opt;

    for (oracle::Predicate p :
         {oracle::Predicate::eq_controlled_order, oracle::Predicate::eq_controlled_norm}) {
        oracle::SampledCheck chk = oracle::sampled_check(p, pi, 64, 2024);
        CHECK(chk.samples == 64);
        CHECK(chk.max_violation <= 1e-9);
        CHECK_FALSE(chk.witness.has_value());
    }

    FrameAssessment kas = assess_k_g_fusion(inst.system, inst.controllers, inst.K);
    pi.K = &inst.K;
    pi.A = kas.k_verdict->A_K;
    for (oracle::Predicate p : {oracle::Predicate::eq_k_order, oracle::Predicate::eq_k_norm}) {
        oracle::SampledCheck chk = oracle::sampled_check(p, pi, 64, 2024);
        CHECK(chk.max_violation <= 1e-9);
        CHECK_FALSE(chk.witness.has_value());
    }
}

TEST_CASE("sampling exposes inflated lower constants with a witness") {
    RandomInstance inst = gen_random(32, 2, 4, 4, GenMode::diagonal, 6.0);
    FrameAssessment as = assess_controlled(inst.system, inst.controllers);

    oracle::PredicateInstance pi;
    pi.system = &inst.system;
    pi.ctrl = &inst.controllers;
    pi.A = as.A_opt * 1.5;  // the optimal bound is tight, so this must fail
    pi.B = as.B_opt;

    oracle::SampledCheck chk =
        oracle::sampled_check(oracle::Predicate::eq_controlled_order, pi, 256, 7);
    CHECK(chk.max_violation > 1e-9);
    CHECK(chk.witness.has_value());

    // determinism of the sampling stream
    oracle::SampledCheck again =
        oracle::sampled_check(oracle::Predicate::eq_controlled_order, pi, 256, 7);
    CHECK(chk.max_violation == again.max_violation);
}

TEST_CASE("vacuous lower predicate with K = 0 never produces a witness") {
    RandomInstance inst = gen_random(33, 2, 4, 3, GenMode::diagonal, 4.0);
    AdjointableOp K0 = AdjointableOp::zero(2, 4, 4);
    FrameAssessment kas = assess_k_g_fusion(inst.system, inst.controllers, K0);
    REQUIRE(std::isinf(kas.k_verdict->A_K));

    oracle::PredicateInstance pi;
    pi.system = &inst.system;
    pi.ctrl = &inst.controllers;
    pi.K = &K0;
    pi.A = kas.k_verdict->A_K;
    pi.B = kas.B_opt;
    oracle::SampledCheck chk = oracle::sampled_check(oracle::Predicate::eq_k_order, pi, 32, 11);
    CHECK(chk.max_violation <= 1e-9);
    CHECK_FALSE(chk.witness.has_value());
}
