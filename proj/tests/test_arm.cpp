#include <cmath>

#include <gtest/gtest.h>

#include "sconcord/arm.hpp"
#include "sconcord/problems/barrier.hpp"
#include "sconcord/problems/nmf.hpp"
#include "sconcord/problems/polynomial.hpp"

using namespace sconcord;

TEST(ModelValue, Examples) {
    // kappa -> 0 leaves the quadratic t^2 curv / 2, the model whose minimizer is the t = 1 step below
    EXPECT_DOUBLE_EQ(model_value(1.0, 1.0, 0.0, 0.5, 10.0).value(), 10.0 - 0.5 + 0.125);
    EXPECT_EQ(model_value(1.0, -1.0, 1.0, 0.0, 123.0).value(), 0.0);
    // -0.5 + omega_star(0.5) with omega_star(z) = -z - log(1 - z)
    EXPECT_NEAR(model_value(1.0, 1.0, 1.0, 0.5, 0.0).value(), -0.5 + (-0.5 - std::log(0.5)), 1e-12);
    EXPECT_TRUE(model_value(1.0, -1.0, 1.0, 0.5, 0.0).is_infinite());
    EXPECT_THROW(model_value(1.0, 1.0, 1.0, -1.0, 0.0), std::domain_error);
}

TEST(StepFirstOption, Examples) {
    EXPECT_DOUBLE_EQ(step_first_option(1.0, 1.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(step_first_option(1.0, 1.0, 1.0), 0.5);
    EXPECT_EQ(step_first_option(0.0, 5.0, 1.0), 0.0);
    EXPECT_TRUE(std::isinf(step_first_option(1.0, 0.0, 1.0)));
}

TEST(StepFirstOption, MinimizesTheModel) {
    for (double rho : {0.3, 1.0, 4.0})
        for (double curv : {0.5, 2.0})
            for (double kappa : {0.5, 1.0, 3.0}) {
                const double t = step_first_option(rho, curv, kappa);
                const double mt = model_value(rho, curv, kappa, t, 0.0).value();
                for (double s : {0.9 * t, 1.1 * t}) {
                    const ExtendedReal ms = model_value(rho, curv, kappa, s, 0.0);
                    if (ms.is_finite()) EXPECT_LE(mt, ms.value() + 1e-14);
                }
            }
}

TEST(StepNegcurv, Examples) {
    EXPECT_NEAR(step_negcurv(-1.0, 2.0, 1.0, 1.0), 1.0 / (std::sqrt(2.0) * (1.0 + std::sqrt(2.0))), 1e-15);
    EXPECT_NEAR(step_negcurv(-1.0, 2.0, 1.0, 1.0), 0.292893, 1e-6);
    EXPECT_LT(step_negcurv(-1e-12, 2.0, 1.0, 1.0), 1e-11);
    EXPECT_THROW(step_negcurv(-3.0, 2.0, 1.0, 1.0), std::domain_error);
}

TEST(DirectionNewton, QuadraticWithReference) {
    ReferencePair p{prox_quadratic(Vector::Zero(2), 1.0), problems::scaled_square_norm(2, 1.0), 0.0, 0.0, std::nullopt};
    const DirectionOutcome o = direction_newton(p, Vector(Eigen::Vector2d(2, 0)), 1.0);
    EXPECT_NEAR(o.d[0], -1.0, 1e-15);
    EXPECT_NEAR(o.d[1], 0.0, 1e-15);
    EXPECT_NEAR(o.nu * o.nu, 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(1.0 / (1.0 + p.kappa * o.nu), 1.0);
}

TEST(DirectionNewton, NuNonincreasingInSigma) {
    Rng rng(17);
    Matrix a(5, 5);
    for (int j = 0; j < 5; ++j) a.col(j) = rng.normal_vector(5);
    const Matrix h = a * a.transpose() + 0.1 * Matrix::Identity(5, 5);
    Oracle::Callbacks cb;
    cb.value = [h](const Vector& x) { return 0.5 * x.dot(h * x); };
    cb.gradient = [h](const Vector& x) -> Vector { return h * x; };
    cb.hessian = [h](const Vector&) -> Matrix { return h; };
    ReferencePair p{Oracle(5, std::move(cb)), problems::scaled_square_norm(5, 1.0), 1.0, 0.0, std::nullopt};
    const Vector x = rng.normal_vector(5);
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 1e-3; s < 1e3; s *= 2.0) {
        const double nu = direction_newton(p, x, s).nu;
        EXPECT_LE(nu, prev * (1.0 + 1e-12));
        prev = nu;
    }
}

TEST(DirectionNegcurv, SaddleOfIndefiniteQuadratic) {
    Oracle::Callbacks cb;
    cb.value = [](const Vector& x) { return x[0] * x[0] - x[1] * x[1]; };
    cb.gradient = [](const Vector& x) -> Vector { return Vector(Eigen::Vector2d(2 * x[0], -2 * x[1])); };
    cb.hessian = [](const Vector&) -> Matrix { return Vector(Eigen::Vector2d(2, -2)).asDiagonal(); };
    ReferencePair p{Oracle(2, std::move(cb)), problems::scaled_square_norm(2, 1.0), 1.0, 0.0, std::nullopt};
    const DirectionOutcome o = direction_negcurv(p, Vector::Zero(2), 1.0, 0.01, {1e-6, 1e-6, 3});
    ASSERT_EQ(o.kind, DirectionKind::neg_curvature);
    ASSERT_TRUE(o.lambda_min_est);
    EXPECT_NEAR(o.lambda_min_est->value, -2.0, 1e-6);
    EXPECT_NEAR(o.lambda_nc, 0.1, 1e-12);
    EXPECT_NEAR(std::abs(o.d[1]), 1.0, 1e-6);
    EXPECT_NEAR(o.d[0], 0.0, 1e-6);
}

TEST(DirectionNegcurv, PositiveDefiniteTakesNewtonBranch) {
    ReferencePair p{prox_quadratic(Vector::Zero(3), 2.0), problems::scaled_square_norm(3, 1.0), 1.0, 0.0, std::nullopt};
    const DirectionOutcome o = direction_negcurv(p, Vector::Ones(3), 1.0, 1e-4);
    EXPECT_EQ(o.kind, DirectionKind::newton_like);
}

TEST(DirectionNegcurv, SignRuleMakesDescent) {
    // gradient has a positive component along e2 at this point
    Oracle::Callbacks cb;
    cb.value = [](const Vector& x) { return x[0] * x[0] - x[1] * x[1] + 3.0 * x[1]; };
    cb.gradient = [](const Vector& x) -> Vector { return Vector(Eigen::Vector2d(2 * x[0], -2 * x[1] + 3.0)); };
    cb.hessian = [](const Vector&) -> Matrix { return Vector(Eigen::Vector2d(2, -2)).asDiagonal(); };
    ReferencePair p{Oracle(2, std::move(cb)), problems::scaled_square_norm(2, 1.0), 1.0, 0.0, std::nullopt};
    const Vector x = Vector::Zero(2);
    const DirectionOutcome o = direction_negcurv(p, x, 1.0, 0.01);
    ASSERT_EQ(o.kind, DirectionKind::neg_curvature);
    EXPECT_LE(p.objective.gradient(x).dot(o.d), 0.0);
}

TEST(ArmSolve, FirstTrialInfeasibleRejectsAndRaisesSigma) {
    // kappa forced to 0 gives the pure Newton step 2x - x^2, which leaves the domain from x = 3
    ReferencePair p{problems::barrier_quadratic(Vector::Zero(1)), zero_function(1), 1.0, std::nullopt, std::nullopt};
    ArmConfig c;
    c.kappa = 0.0;
    c.max_iters = 1;
    const SolveReport r = arm_solve(p, Vector::Constant(1, 3.0), c);
    ASSERT_GE(r.trace.size(), 2u);
    EXPECT_FALSE(*r.trace[0].accepted);
    EXPECT_EQ(r.final_point[0], 3.0);
    EXPECT_GE(*r.trace[1].sigma, c.gamma2 * c.sigma0);
    EXPECT_LE(*r.trace[1].sigma, c.gamma3 * c.sigma0);
}

TEST(ArmSolve, NewtonOnNmfMse) {
    problems::NmfInstance inst = problems::make_nmf_mse(20, 10, 5, 1);
    const ReferencePair pair = problems::nmf_oracles(inst);
    ArmConfig c;
    c.eps = 1e-4;
    c.max_iters = 500;
    const SolveReport r = arm_solve(pair, problems::nmf_initial_point(inst, 2), c);
    EXPECT_EQ(r.status, SolveStatus::converged) << r.message;
    EXPECT_LE(r.final_nu, 1e-4);
}

TEST(ArmSolve, NegcurvEscapesSaddle) {
    const Oracle f = problems::saddle_objective();
    const problems::PolynomialReference ref = problems::polynomial_reference_fit(f, 2, 200, 4);
    ReferencePair pair{f, ref.reference, 1.0, ref.kappa_ref, -0.25};
    ArmConfig c;
    c.option = ArmOption::negcurv;
    c.seed = 3;
    const SolveReport r = arm_solve(pair, Vector::Zero(2), c);
    EXPECT_LT(f.value(r.final_point).value(), 0.0);
}

TEST(ArmSolve, NewtonStaysAtSaddle) {
    const Oracle f = problems::saddle_objective();
    const problems::PolynomialReference ref = problems::polynomial_reference_fit(f, 2, 200, 4);
    ReferencePair pair{f, ref.reference, 1.0, ref.kappa_ref, -0.25};
    const SolveReport r = arm_solve(pair, Vector::Zero(2), ArmConfig{});
    EXPECT_EQ(r.final_point, Vector::Zero(2));
    EXPECT_EQ(r.status, SolveStatus::converged);
}

TEST(ArmSolve, ConfigValidation) {
    ArmConfig c;
    c.eta1 = 0.95;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    ReferencePair p{prox_quadratic(Vector::Zero(1), 1.0), zero_function(1), 1.0, std::nullopt, std::nullopt};
    ArmConfig g;
    g.option = ArmOption::general;
    EXPECT_THROW(arm_solve(p, Vector::Ones(1), g), std::invalid_argument);
    g.option = ArmOption::negcurv;
    EXPECT_THROW(arm_solve(p, Vector::Ones(1), g), std::invalid_argument);
}

TEST(ArmSolve, GeneralOptionWithGradientDirection) {
    ReferencePair p{problems::log_barrier_demo(3), zero_function(3), 1.0, 0.0, 3.0};
    DirectionProvider dp;
    dp.direction = [](const Vector&, const Vector& g, double) -> Vector { return -g; };
    ArmConfig c;
    c.option = ArmOption::general;
    c.eps = 1e-8;
    const SolveReport r = arm_solve(p, Vector(Eigen::Vector3d(0.5, 2.0, 3.0)), c, dp);
    EXPECT_EQ(r.status, SolveStatus::converged);
    EXPECT_LE((r.final_point - Vector::Ones(3)).norm(), 1e-5);
}
