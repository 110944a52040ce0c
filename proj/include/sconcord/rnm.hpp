#pragma once

// Regularized Newton method: x+ = x - (1 / (1 + kappa nu)) (H_f + H_F)^{-1} grad f.

#include <cmath>
#include <string>
#include <utility>

#include "numerics.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "scalar.hpp"

namespace sconcord {

struct RnmConfig {
    int max_iters = 500;
    double tol_nu = 1e-8;
    bool record_trace = true;
    bool timing = true;
};

struct RnmStep {
    Vector x_next;
    Vector direction;
    StepQuantities quantities;
    double nu = 0.0;
    double step = 0.0;
};

/// Solves (H_f + sigma H_F) d = -grad and returns d with nu = sqrt(-grad' d).
/// Throws AssumptionViolation when the system is not positive definite or
/// -grad' d is negative beyond roundoff.
inline std::pair<Vector, double> regularized_newton_direction(const ReferencePair& pair, const Vector& x,
                                                              const Vector& grad, double sigma) {
    const Matrix h = pair.objective.hessian(x) + sigma * pair.reference.hessian(x);
    const PdSolveResult sol = solve_pd(h, grad);
    if (!sol.success)
        throw AssumptionViolation("Hessian of f + sigma F is not positive definite (pivot " +
                                  std::to_string(sol.smallest_pivot) + ")");
    Vector d = -sol.solution;
    double nu2 = -grad.dot(d);
    if (nu2 < 0.0) {
        if (nu2 < -1e-12 * grad.squaredNorm())
            throw AssumptionViolation("grad' (H_f + sigma H_F)^{-1} grad is negative");
        nu2 = 0.0;
    }
    return {std::move(d), std::sqrt(nu2)};
}

inline RnmStep rnm_step(const ReferencePair& pair, const Vector& x) {
    if (!pair.objective.in_domain(x)) throw std::domain_error("rnm_step: x outside the domain");
    const Vector grad = pair.objective.gradient(x);
    auto [d, nu] = regularized_newton_direction(pair, x, grad, 1.0);
    RnmStep s;
    s.nu = nu;
    s.step = 1.0 / (1.0 + pair.kappa * nu);
    s.x_next = x + s.step * d;
    // along the Newton direction rho = delta + Delta = nu^2
    const double delta = pair.objective.curvature(x, d);
    s.quantities = StepQuantities::from(nu * nu, delta, nu * nu - delta, pair.kappa);
    s.direction = std::move(d);
    return s;
}

inline SolveReport rnm_solve(const ReferencePair& pair, const Vector& x0, const RnmConfig& cfg = {}) {
    pair.validate();
    if (cfg.max_iters < 1) throw std::invalid_argument("rnm_solve: max_iters must be >= 1");
    if (!pair.objective.in_domain(x0)) throw std::domain_error("rnm_solve: x0 outside the domain");

    Stopwatch clock(cfg.timing);
    SolveReport rep;
    Vector x = x0;
    double fx = pair.objective.value(x).value();
    for (int j = 0;; ++j) {
        RnmStep s;
        try {
            s = rnm_step(pair, x);
        } catch (const AssumptionViolation& e) {
            rep.status = SolveStatus::assumption_violation;
            rep.message = e.what();
            break;
        }
        TraceRecord rec;
        rec.iter = j;
        rec.f_value = fx;
        rec.nu = s.nu;
        rec.accepted = true;
        rec.calls = pair.counts();
        rec.wall_nanos = clock.elapsed();
        rep.final_nu = s.nu;

        if (s.nu <= cfg.tol_nu) {
            rec.step_size = 0.0;
            rep.push(rec, cfg.record_trace);
            rep.status = SolveStatus::converged;
            break;
        }
        if (j == cfg.max_iters) {
            rep.push(rec, cfg.record_trace);
            rep.status = SolveStatus::max_iters;
            break;
        }
        rec.step_size = s.step;
        rep.push(rec, cfg.record_trace);

        const ExtendedReal f_next = pair.objective.value(s.x_next);
        if (f_next.is_infinite()) {
            rep.status = SolveStatus::domain_rejection;
            rep.message = "RNM step left the domain at iteration " + std::to_string(j);
            break;
        }
        x = s.x_next;
        fx = f_next.value();
    }
    rep.final_point = x;
    return rep;
}

/// Right-hand side of the RNM rate: sqrt(2 (1 + Gamma) (f(x0) - lb) / (k + 1)).
inline double rnm_theorem_bound(double f0, double lower_bound, double kappa, int k) {
    const double gap = std::max(f0 - lower_bound, 0.0);
    const double gamma = gamma_f(gap, kappa);
    return std::sqrt(2.0 * (1.0 + gamma) * gap / (k + 1.0));
}

}  // namespace sconcord
