#include <cmath>

#include <gtest/gtest.h>

#include "sconcord/numerics.hpp"
#include "sconcord/scalar.hpp"
#include "sconcord/suites.hpp"

using namespace sconcord;

namespace {

LinearOperator diag_op(const Vector& d) { return LinearOperator::from_matrix(Matrix(d.asDiagonal())); }

}  // namespace

TEST(SolvePd, Examples) {
    const Vector g = Vector::LinSpaced(4, -1, 2);
    const PdSolveResult a = solve_pd(Matrix::Identity(4, 4), g);
    ASSERT_TRUE(a.success);
    EXPECT_LE((a.solution - g).norm(), 1e-15);

    const PdSolveResult b = solve_pd(Vector(Eigen::Vector2d(1, 4)).asDiagonal(), Vector(Eigen::Vector2d(1, 8)));
    ASSERT_TRUE(b.success);
    EXPECT_NEAR(b.solution[0], 1.0, 1e-15);
    EXPECT_NEAR(b.solution[1], 2.0, 1e-15);

    EXPECT_FALSE(solve_pd(Vector(Eigen::Vector2d(1, -1)).asDiagonal(), Vector::Ones(2)).success);
    EXPECT_THROW(solve_pd(Matrix::Identity(3, 3), Vector::Ones(2)), std::invalid_argument);
}

TEST(SolvePd, ResidualOnModeratelyIllConditioned) {
    Rng rng(3);
    for (int s = 0; s < 20; ++s) {
        Vector spec(30);
        for (int i = 0; i < 30; ++i) spec[i] = rng.log_uniform(1e-4, 1e4);
        const Matrix h = suites::spd_with_spectrum(spec, rng);
        const Vector g = rng.normal_vector(30);
        const PdSolveResult r = solve_pd(h, g);
        ASSERT_TRUE(r.success);
        // normwise backward error of a stable Cholesky solve
        const double backward = (h * r.solution - g).norm() / (h.norm() * r.solution.norm() + g.norm());
        EXPECT_LE(backward, 1e-14);
    }
}

TEST(Lanczos, DiagonalBrackets) {
    const LinearOperator a = diag_op(Vector(Eigen::Vector3d(1, 2, 3)));
    const EigenEstimate hi = lanczos_extreme(a, EigenMode::largest, {.rel_tol = 1.0 / 3.0, .seed = 1});
    EXPECT_GE(hi.value, 2.0);
    EXPECT_LE(hi.value, 4.0);
    EXPECT_NEAR(hi.vector.norm(), 1.0, 1e-10);
    const EigenEstimate lo =
        lanczos_extreme(a, EigenMode::smallest, {.rel_tol = 1.0 / 3.0, .seed = 2, .beta_bound = std::sqrt(3.0)});
    EXPECT_GE(lo.value, 2.0 / 3.0);
    EXPECT_LE(lo.value, 4.0 / 3.0);
}

TEST(Lanczos, RotatedSpectrumBothModes) {
    Vector spec(50);
    for (int i = 0; i < 50; ++i) spec[i] = 1.0 + 0.5 * i;  // known extremes 1 and 25.5
    int hits = 0;
    for (int s = 0; s < 100; ++s) {
        Rng rng(1000 + s);
        const Matrix h = suites::spd_with_spectrum(spec, rng);
        const LinearOperator op = LinearOperator::from_matrix(h);
        const EigenEstimate hi = lanczos_extreme(op, EigenMode::largest, {.rel_tol = 1.0 / 3.0, .seed = derive_seed(s, 1)});
        const EigenEstimate lo = lanczos_extreme(
            op, EigenMode::smallest, {.rel_tol = 1.0 / 3.0, .seed = derive_seed(s, 2), .beta_bound = std::sqrt(25.5)});
        // Rayleigh quotients never overshoot lambda_max
        EXPECT_LE(hi.value, 25.5 * (1.0 + 1e-12));
        if (std::abs(hi.value - 25.5) <= 25.5 / 3.0 && std::abs(lo.value - 1.0) <= 1.0 / 3.0) ++hits;
    }
    EXPECT_GE(hits, 95);
}

TEST(SqrtCond, Examples) {
    for (int s = 0; s < 5; ++s) {
        const double v = sqrt_cond(LinearOperator::from_matrix(Matrix::Identity(3, 3)), 1e-3, 1.0, s).value;
        EXPECT_GE(v, 1.0 - 1e-12);
        EXPECT_LE(v, 2.0);
    }
    int ok100 = 0, ok4 = 0;
    for (int s = 0; s < 100; ++s) {
        const double a = sqrt_cond(diag_op(Vector(Eigen::Vector2d(1, 100))), 1e-3, 10.0, s).value;
        const double b = sqrt_cond(diag_op(Vector(Eigen::Vector2d(1, 4))), 1e-3, 2.0, s).value;
        ok100 += a >= 10.0 - 1e-9 && a <= 20.0;
        ok4 += b >= 2.0 - 1e-9 && b <= 4.0;
    }
    EXPECT_GE(ok100, 95);
    EXPECT_GE(ok4, 95);
}

TEST(CgInverse, IterationCountFormula) {
    // log_{1/3}(5e-5) ~ 9.02, so floor + 1 = 10, capped at n = 5
    EXPECT_EQ(cg_iteration_count(5, 2.0, 0.0001), 5);
    EXPECT_EQ(cg_iteration_count(100, 2.0, 0.0001), static_cast<int>(std::floor(std::log(5e-5) / std::log(1.0 / 3.0))) + 1);
}

TEST(CgInverse, IdentityInOneStep) {
    const Vector g = Vector::LinSpaced(6, 1, 6);
    const CgResult r = cg_inverse(LinearOperator::from_matrix(Matrix::Identity(6, 6)), g, 3.0, 0.5);
    EXPECT_LE((r.solution - g).norm(), 1e-14);
}

TEST(CgInverse, EnergyBoundWithTrueConditionBound) {
    Vector d = Vector::Ones(10);
    d[9] = 10.0;
    const Matrix h = d.asDiagonal();
    const double alpha = appendix_constants().alpha_star;
    Rng rng(6);
    for (int s = 0; s < 20; ++s) {
        const Vector g = rng.normal_vector(10);
        const Vector exact = g.cwiseQuotient(d);
        const CgResult r = cg_inverse(LinearOperator::from_matrix(h), g, 4.0, alpha);
        const Vector e = r.solution - exact;
        EXPECT_LE(std::sqrt(e.dot(h * e)), alpha * std::sqrt(g.dot(exact)) + 1e-12);
    }
}

TEST(NumericsSuite, RandomSystems) {
    for (const suites::Check& c : suites::numerics()) EXPECT_TRUE(c.passed) << c.name << " worst " << c.worst;
}
