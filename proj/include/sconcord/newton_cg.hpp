#pragma once

// Line-search-free Newton-CG for convex self-concordant functions, with a
// Lanczos-estimated condition bound driving the CG iteration budget.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "oracle.hpp"
#include "scalar.hpp"

namespace sconcord {

struct NewtonCgConfig {
    double kappa = 1.0;
    double eps0 = 1e-3;
    double eps1 = 1e-6;
    double beta = 10.0;
    double fail_prob = 0.01;
    int max_iters = 0;  // 0: derive from gap_budget via default_newton_cg_iters
    double gap_budget = 1.0;
    bool hvp_only = false;
    std::uint64_t seed = 0;
};

struct NewtonCgState {
    double beta_k = 0.0;
    std::optional<double> beta_local;
    bool flag = true;
    bool k_star_reached = false;
};

enum class NewtonCgCertificate { early_exit_at_x0, converged, max_iters };

inline const char* to_string(NewtonCgCertificate c) {
    switch (c) {
        case NewtonCgCertificate::early_exit_at_x0: return "early_exit_at_x0";
        case NewtonCgCertificate::converged: return "converged";
        case NewtonCgCertificate::max_iters: return "max_iters";
    }
    return "unknown";
}

struct NewtonCgIteration {
    int k = 0;
    double f_value = 0.0;
    double rho = 0.0;
    double delta = 0.0;
    double step = 0.0;
    double beta_k = 0.0;
    bool local_phase = false;
    int cg_iterations = 0;
    Vector x;  // x_k
};

struct NewtonCgResult {
    Vector y;
    NewtonCgCertificate certificate = NewtonCgCertificate::max_iters;
    std::vector<NewtonCgIteration> trace;
    NewtonCgState state;
    long hvp_count = 0;
    std::string message;
};

/// 2 + ceil(gap / omega(R3)) + ceil(2 log_{1/C2}(R2 / (kappa eps1))), the
/// theorem's iteration count with a user-supplied f-gap budget.
inline int default_newton_cg_iters(double kappa, double eps1, double gap_budget) {
    const AppendixConstants& c = appendix_constants();
    const double k1 = std::ceil(kappa * kappa * std::max(gap_budget, 0.0) / omega(c.r3));
    const double k2 = std::ceil(2.0 * std::log(c.r2 / (kappa * eps1)) / std::log(1.0 / c.c2));
    const double total = 2.0 + k1 + std::max(k2, 0.0);
    return static_cast<int>(std::min(total, 1e7));
}

/// Exact Newton decrement sqrt(grad' H^{-1} grad) via a Cholesky solve.
inline double lambda_f(const Oracle& f, const Vector& x) {
    const Vector g = f.gradient(x);
    const PdSolveResult sol = solve_pd(f.hessian(x), g);
    if (!sol.success) throw std::domain_error("lambda_f: Hessian is not positive definite");
    return std::sqrt(std::max(g.dot(sol.solution), 0.0));
}

namespace detail {

inline LinearOperator hessian_operator(const Oracle& f, const Vector& x, bool hvp_only, long& hvps) {
    if (hvp_only) {
        return {f.dim(), [f, x, &hvps](const Vector& v) -> Vector {
                    ++hvps;
                    return f.hvp(x, v);
                }};
    }
    const Matrix h = f.hessian(x);
    return {f.dim(), [h, &hvps](const Vector& v) -> Vector {
                ++hvps;
                return h * v;
            }};
}

}  // namespace detail

inline NewtonCgResult newton_cg_solve(const Oracle& f, const Vector& x0, const NewtonCgConfig& cfg) {
    if (!(cfg.kappa > 0.0))
        throw std::invalid_argument("newton_cg_solve: kappa must be positive (use a direct solve for kappa = 0)");
    if (!(cfg.eps0 > 0.0 && cfg.eps1 > 0.0)) throw std::invalid_argument("newton_cg_solve: eps0, eps1 must be positive");
    if (!(cfg.beta > 1.0)) throw std::invalid_argument("newton_cg_solve: beta must exceed 1");
    if (!(cfg.fail_prob >= 0.0 && cfg.fail_prob < 1.0))
        throw std::invalid_argument("newton_cg_solve: fail_prob must lie in [0, 1)");
    if (!f.in_domain(x0)) throw std::domain_error("newton_cg_solve: x0 outside the domain");

    const AppendixConstants& c = appendix_constants();
    const double kappa = cfg.kappa;
    const double global_threshold = c.r1 * c.r1 / (kappa * kappa);
    const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : default_newton_cg_iters(kappa, cfg.eps1, cfg.gap_budget);
    // sqrt-cond needs a strictly positive failure budget for its Lanczos counts
    const double sc_fail = std::max(0.5 * cfg.fail_prob, 1e-12);

    NewtonCgResult out;
    Vector x = x0;
    {
        const LinearOperator h0 = detail::hessian_operator(f, x, cfg.hvp_only, out.hvp_count);
        out.state.beta_k = std::max(sqrt_cond(h0, sc_fail, cfg.beta, derive_seed(cfg.seed, 0)).value, 1.0 + 1e-12);
    }

    double f_prev = f.value(x).value();
    for (int k = 0;; ++k) {
        const Vector g = f.gradient(x);
        const LinearOperator hk = detail::hessian_operator(f, x, cfg.hvp_only, out.hvp_count);
        const CgResult cg = cg_inverse(hk, g, out.state.beta_k, c.alpha_star);
        const Vector& h = cg.solution;
        const double rho = h.dot(g);
        const double delta = h.dot(hk.apply(h));

        NewtonCgIteration it;
        it.k = k;
        it.x = x;
        it.f_value = f_prev;
        it.rho = rho;
        it.delta = delta;
        it.beta_k = out.state.beta_k;
        it.cg_iterations = cg.iterations;
        it.local_phase = !(rho > global_threshold);

        if (rho <= (1.0 - c.alpha_star) * cfg.eps1 * cfg.eps1 ||
            (k == 0 && rho <= (1.0 - c.alpha_star) * cfg.eps0 * cfg.eps0)) {
            out.trace.push_back(it);
            out.y = x;
            out.certificate = k == 0 ? NewtonCgCertificate::early_exit_at_x0 : NewtonCgCertificate::converged;
            return out;
        }
        if (k == max_iters) {
            out.trace.push_back(it);
            out.y = x;
            out.certificate = NewtonCgCertificate::max_iters;
            out.message = "iteration budget exhausted (beta underestimate or non-self-concordant input?)";
            return out;
        }

        double t = 0.0;
        if (rho > global_threshold) {
            t = rho / (delta + kappa * rho * std::sqrt(delta));
            const double b = 1.0 + std::sqrt(1.0 + c.alpha_star) / (1.0 - c.alpha_star) * kappa * std::sqrt(rho);
            out.state.beta_k *= b * b;
        } else {
            if (out.state.flag) {
                const double beta_star =
                    sqrt_cond(hk, sc_fail, out.state.beta_k, derive_seed(cfg.seed, 1)).value;
                out.state.beta_local = std::pow(c.c3, 4) * beta_star;
                out.state.flag = false;
                out.state.k_star_reached = true;
            }
            t = rho / (delta + 2.0 * kappa * rho * std::sqrt(delta));
            out.state.beta_k = *out.state.beta_local;
        }
        it.step = t;
        out.trace.push_back(it);

        const Vector next = x - t * h;
        const ExtendedReal f_next = f.value(next);
        if (f_next.is_infinite() || f_next.value() > f_prev + 1e-12 * (1.0 + std::abs(f_prev))) {
            out.y = x;
            out.certificate = NewtonCgCertificate::max_iters;
            out.message = "aborted: step increased f or left the domain at k = " + std::to_string(k) +
                          " (CG quality collapse)";
            return out;
        }
        x = next;
        f_prev = f_next.value();
    }
}

}  // namespace sconcord
