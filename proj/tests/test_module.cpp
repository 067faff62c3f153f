#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ccgf/module_space.hpp"

using namespace ccgf;

namespace {

AdjointableOp random_op(int m, int p, int n, Rng& rng) {
    std::vector<Eigen::MatrixXcd> blocks(m, Eigen::MatrixXcd::Zero(p, n));
    for (int s = 0; s < m; ++s)
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < n; ++c) blocks[s](r, c) = rng.cnormal();
    return AdjointableOp(std::move(blocks));
}

}  // namespace

TEST_CASE("inner product is linear in the first argument and conjugate-symmetric") {
    Rng rng(11);
    ModuleVector f = ModuleVector::random(3, 5, rng);
    ModuleVector g = ModuleVector::random(3, 5, rng);
    AlgebraElement a(std::vector<Complex>{{2.0, 1.0}, {0.0, -1.0}, {1.5, 0.0}});

    // <af, g> = a <f, g>
    AlgebraElement lhs = inner_product(f.scaled(a), g);
    AlgebraElement rhs = a * inner_product(f, g);
    CHECK((lhs - rhs).norm() < 1e-12);

    // <f, g>* = <g, f>
    CHECK((inner_product(f, g).adjoint() - inner_product(g, f)).norm() < 1e-12);

    // <f, f> is positive and consistent with the norm
    AlgebraElement gram = inner_product(f, f);
    CHECK(gram.is_positive());
    CHECK(f.norm() == doctest::Approx(std::sqrt(gram.norm())));
}

TEST_CASE("basis vectors are orthonormal per slot") {
    ModuleVector e0 = ModuleVector::basis(2, 4, 0);
    ModuleVector e1 = ModuleVector::basis(2, 4, 1);
    CHECK((inner_product(e0, e0) - AlgebraElement::one(2)).norm() == 0.0);
    CHECK(inner_product(e0, e1).norm() == 0.0);
}

TEST_CASE("adjoint satisfies the module identity <Tf, g> = <f, T*g>") {
    Rng rng(5);
    AdjointableOp T = random_op(2, 3, 4, rng);
    ModuleVector f = ModuleVector::random(2, 4, rng);
    ModuleVector g = ModuleVector::random(2, 3, rng);
    AlgebraElement lhs = inner_product(T.apply(f), g);
    AlgebraElement rhs = inner_product(f, T.adjoint().apply(g));
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("composition, addition and scaling act slot-wise") {
    Rng rng(7);
    AdjointableOp A = random_op(2, 3, 4, rng);
    AdjointableOp B = random_op(2, 4, 5, rng);
    ModuleVector f = ModuleVector::random(2, 5, rng);
    CHECK((A.compose(B).apply(f) - A.apply(B.apply(f))).norm() < 1e-12);
    CHECK_THROWS_AS(B.compose(A), DimensionError);

    AdjointableOp S = A + A.scaled(Complex(-1.0, 0.0));
    CHECK(S.norm() < 1e-15);
}

TEST_CASE("operator norm is the max slot spectral norm") {
    std::vector<Eigen::MatrixXcd> blocks(2);
    blocks[0] = Eigen::MatrixXcd::Zero(2, 2);
    blocks[0](0, 0) = 3.0;
    blocks[1] = Eigen::MatrixXcd::Zero(2, 2);
    blocks[1](1, 1) = -7.0;
    CHECK(AdjointableOp(blocks).norm() == doctest::Approx(7.0));
}

TEST_CASE("classification of structured operators") {
    OpClassification id = classify(AdjointableOp::identity(2, 3));
    CHECK(id.self_adjoint);
    CHECK(id.positive);
    CHECK(id.invertible);
    CHECK(id.gl_plus);
    CHECK(id.bounded_below);
    CHECK(id.norm == doctest::Approx(1.0));
    CHECK(id.min_gap == doctest::Approx(1.0));

    std::vector<Eigen::VectorXcd> diag(1, Eigen::VectorXcd::Zero(2));
    diag[0] << Complex(2.0, 0.0), Complex(-1.0, 0.0);
    OpClassification mixed = classify(AdjointableOp::diagonal(diag));
    CHECK(mixed.self_adjoint);
    CHECK_FALSE(mixed.positive);
    CHECK(mixed.invertible);
    CHECK_FALSE(mixed.gl_plus);

    OpClassification wide = classify(AdjointableOp::zero(1, 2, 3));
    CHECK_FALSE(wide.invertible);
    CHECK(wide.min_gap == 0.0);
}

TEST_CASE("commutation check and exact diagonal commutation") {
    Rng rng(3);
    std::vector<Eigen::VectorXcd> d1(2, Eigen::VectorXcd::Zero(3));
    std::vector<Eigen::VectorXcd> d2(2, Eigen::VectorXcd::Zero(3));
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < 3; ++i) {
            d1[s](i) = rng.cnormal();
            d2[s](i) = rng.cnormal();
        }
    // diagonal operators commute exactly in floating point
    CommutationCheck cc = commutes(AdjointableOp::diagonal(d1), AdjointableOp::diagonal(d2));
    CHECK(cc.commute);
    CHECK(cc.residual == 0.0);

    AdjointableOp T = random_op(2, 3, 3, rng);
    CommutationCheck nc = commutes(T, AdjointableOp::diagonal(d1));
    CHECK_FALSE(nc.commute);
    CHECK_THROWS_AS(commutes(random_op(1, 2, 3, rng), AdjointableOp::identity(1, 3)),
                    DimensionError);
}

TEST_CASE("operator square root and inverse") {
    Rng rng(9);
    AdjointableOp G = random_op(2, 4, 4, rng);
    AdjointableOp pos = G.compose(G.adjoint()) + AdjointableOp::scalar(2, 4, 0.5);
    AdjointableOp root = op_sqrt(pos);
    CHECK((root.compose(root) - pos).norm() < 1e-10);
    CHECK(classify(root).positive);

    AdjointableOp inv = op_inverse(pos);
    CHECK((pos.compose(inv) - AdjointableOp::identity(2, 4)).norm() < 1e-10);

    CHECK_THROWS_AS(op_sqrt(AdjointableOp::scalar(1, 2, -1.0)), PositivityError);
    CHECK_THROWS_AS(op_inverse(AdjointableOp::zero(1, 2, 2)), SingularError);
}

TEST_CASE("projector validation, ranks and complement") {
    Projector P = Projector::coordinates(2, 4, {0, 2});
    CHECK(P.ranks() == std::vector<int>{2, 2});
    CHECK((P.op().compose(P.op()) - P.op()).norm() == 0.0);
    Projector Q = P.complement();
    CHECK((P.op() + Q.op() - AdjointableOp::identity(2, 4)).norm() == 0.0);

    // a non-idempotent operator is rejected
    CHECK_THROWS_AS(Projector(AdjointableOp::scalar(1, 2, 0.5)), PositivityError);
    // a non-self-adjoint idempotent is rejected too
    std::vector<Eigen::MatrixXcd> skew(1, Eigen::MatrixXcd::Zero(2, 2));
    skew[0] << 1.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(Projector(AdjointableOp(skew)), PositivityError);
}

TEST_CASE("projector from generators spans exactly the generated submodule") {
    Rng rng(21);
    ModuleVector g1 = ModuleVector::random(2, 5, rng);
    ModuleVector g2 = ModuleVector::random(2, 5, rng);
    Projector P = projector_from_generators({g1, g2});
    CHECK(P.ranks() == std::vector<int>{2, 2});
    CHECK((P.op().apply(g1) - g1).norm() < 1e-12);
    CHECK((P.op().apply(g2) - g2).norm() < 1e-12);

    // a dependent generator does not raise the rank
    Projector P2 = projector_from_generators({g1, g1.scaled(Complex(2.0, 1.0))});
    CHECK(P2.ranks() == std::vector<int>{1, 1});

    // the zero submodule yields the zero projector
    Projector Z = projector_from_generators({ModuleVector(2, 5)});
    CHECK(Z.ranks() == std::vector<int>{0, 0});
    CHECK(Z.op().norm() == 0.0);
}

TEST_CASE("hermitian_function applies the scalar function through the spectrum") {
    std::vector<Eigen::VectorXcd> d(1, Eigen::VectorXcd::Zero(3));
    d[0] << Complex(4.0, 0.0), Complex(9.0, 0.0), Complex(1e-14, 0.0);
    AdjointableOp D = AdjointableOp::diagonal(d);
    AdjointableOp r = hermitian_function(D, [](double x) { return std::sqrt(x); }, 1e-12);
    CHECK(r.block(0)(0, 0).real() == doctest::Approx(2.0));
    CHECK(r.block(0)(1, 1).real() == doctest::Approx(3.0));
    // below the floor the eigenvalue is treated as zero
    CHECK(r.block(0)(2, 2) == Complex(0.0, 0.0));
}

TEST_CASE("deterministic rng stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    Rng c(124);
    bool same = true;
    Rng a2(123);
    for (int i = 0; i < 10; ++i) same = same && (a2.normal() == c.normal());
    CHECK_FALSE(same);
}
