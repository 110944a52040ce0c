#include <cmath>

#include <gtest/gtest.h>

#include "sconcord/ippm.hpp"
#include "sconcord/problems/barrier.hpp"
#include "sconcord/problems/phase_retrieval.hpp"
#include "sconcord/rnm.hpp"

using namespace sconcord;

TEST(NuThreshold, Examples) {
    EXPECT_NEAR(nu_threshold_for_moreau(2.0, 1.0, 0.0, 0.1), 0.1 / 2.0, 1e-15);
    EXPECT_NEAR(nu_threshold_for_moreau(5.0, 1.0, 0.0, 0.3), 2.0 * 0.3 / 5.0, 1e-15);
    EXPECT_NEAR(nu_threshold_for_moreau(2.0, 1.0, 1.0, 0.1), 0.1 / 2.1, 1e-15);
    EXPECT_NEAR(nu_threshold_for_moreau(2.0, 1.0, 1.0, 0.1), 0.047619, 1e-6);
    EXPECT_THROW(nu_threshold_for_moreau(1.0, 1.0, 1.0, 0.1), std::invalid_argument);
}

TEST(MoreauGradNorm, QuadraticClosedForm) {
    // prox of (1/2)||y||^2 with mu = 1 is x / 2, so the envelope gradient is x / 2
    const Oracle f = prox_quadratic(Vector::Zero(3), 1.0);
    const Vector x(Eigen::Vector3d(1.0, -2.0, 0.5));
    EXPECT_NEAR(moreau_grad_norm(f, 0.0, 1.0, x, 1e-10), 0.5 * x.norm(), 1e-8);
}

TEST(MoreauGradNorm, VanishesAtMinimizer) {
    EXPECT_LE(moreau_grad_norm(problems::log_barrier_demo(3), 0.0, 1.0, Vector::Ones(3), 1e-10), 1e-9);
}

TEST(Ippm, StartBelowThresholdReturnsAfterOneInnerExit) {
    IppmConfig c;
    c.kappa = 1.0;
    c.ell = 0.0;
    c.mu = 1.0;
    c.eps = 1e-3;
    const Vector z0 = Vector::Constant(3, 1.0 + 1e-8);
    const IppmResult r = ippm_solve(problems::log_barrier_demo(3), z0, c);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.outer_iterations, 1);
    EXPECT_EQ(r.z, z0);
}

TEST(Ippm, PhaseRetrievalWithinOuterBound) {
    const problems::PhaseRetrievalInstance inst = problems::make_phase_retrieval(4, 12, 2);
    const Oracle f = problems::phase_objective(inst);
    const Vector z0 = problems::phase_initial_point(inst, 9);
    IppmConfig c;
    c.kappa = inst.kappa;
    c.ell = inst.ell;
    c.mu = 2.0 * inst.ell;
    c.eps = 1e-3;
    c.gap_budget = f.value(z0).value();  // noise-free targets: inf f = 0
    const Eigen::SelfAdjointEigenSolver<Matrix> es(f.hessian(z0) + c.mu * Matrix::Identity(8, 8));
    c.beta = 2.0 * std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
    const IppmResult r = ippm_solve(f, z0, c);
    ASSERT_TRUE(r.converged) << r.message;
    EXPECT_LE(r.outer_iterations, static_cast<long>(std::floor(c.k_bound())) + 2);
    ReferencePair prox{f, prox_quadratic(Vector::Zero(8), c.mu), c.kappa, 0.0, std::nullopt};
    const double nu = regularized_newton_direction(prox, r.z, f.gradient(r.z), 1.0).second;
    EXPECT_LE(nu, 1e-3 * (1.0 + 1e-6));
}

TEST(Ippm, MuMustExceedEll) {
    IppmConfig c;
    c.ell = 2.0;
    c.mu = 2.0;
    EXPECT_THROW(ippm_solve(problems::log_barrier_demo(1), Vector::Ones(1), c), std::invalid_argument);
}
