#pragma once

// Inexact proximal point method for (kappa, ell)-weakly self-concordant f:
// each outer step runs Newton-CG on f + (mu/2)||. - z_j||^2.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton_cg.hpp"
#include "oracle.hpp"
#include "scalar.hpp"

namespace sconcord {

struct IppmConfig {
    double kappa = 4.0;
    double ell = 1.0;
    double mu = 2.0;
    double eps = 1e-3;
    double beta = 10.0;
    double fail_prob = 0.01;
    double gap_budget = 1.0;
    int max_outer = 0;  // 0: floor(K) + 2
    bool hvp_only = false;
    std::uint64_t seed = 0;

    double k_bound() const { return 8.0 * mu * gap_budget / ((mu - ell) * eps * eps); }
    double inner_fail_prob() const { return fail_prob / (k_bound() + 2.0); }
    double inner_beta() const { return std::pow(appendix_constants().c3, 2) * beta; }
    double inner_eps1() const {
        const double a = appendix_constants().alpha_star;
        return (std::sqrt((1.0 - a) / (1.0 + a)) - 0.5) * eps;
    }
};

/// f_j(y) = f(y) + (mu/2)||y - z_j||^2.
struct ProxSubproblem {
    Vector center;
    Oracle oracle;

    ProxSubproblem(const Oracle& f, const Vector& z, double mu) : center(z), oracle(add(f, prox_quadratic(z, mu))) {}
};

struct IppmOuter {
    long j = 0;
    double f_value = 0.0;
    double prox_value = 0.0;  // f(z_{j+1}) + (mu/2)||z_{j+1} - z_j||^2
    int inner_iterations = 0;
    NewtonCgCertificate inner_certificate = NewtonCgCertificate::converged;
};

struct IppmResult {
    Vector z;
    bool converged = false;
    long outer_iterations = 0;
    long hvp_count = 0;
    std::vector<IppmOuter> outer_trace;
    std::string message;
};

inline IppmResult ippm_solve(const Oracle& f, const Vector& z0, const IppmConfig& cfg) {
    if (!(cfg.mu > cfg.ell)) throw std::invalid_argument("ippm_solve: mu must exceed ell");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("ippm_solve: eps must be positive");
    if (!(cfg.gap_budget > 0.0)) throw std::invalid_argument("ippm_solve: gap_budget must be positive");
    if (!f.in_domain(z0)) throw std::domain_error("ippm_solve: z0 outside the domain");

    // floor(K) + 2 can be astronomically large; cap it at something a loop can count
    const long max_outer = cfg.max_outer > 0 ? cfg.max_outer
                                             : static_cast<long>(std::min(std::floor(cfg.k_bound()) + 2.0, 1e12));
    NewtonCgConfig inner;
    inner.kappa = cfg.kappa;
    inner.eps0 = cfg.eps;
    inner.eps1 = cfg.inner_eps1();
    inner.beta = cfg.inner_beta();
    inner.fail_prob = cfg.inner_fail_prob();
    inner.gap_budget = cfg.gap_budget;
    inner.hvp_only = cfg.hvp_only;

    IppmResult out;
    Vector z = z0;
    double fz = f.value(z).value();
    for (long j = 0; j < max_outer; ++j) {
        ProxSubproblem sub(f, z, cfg.mu);
        inner.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(j));
        NewtonCgResult res = newton_cg_solve(sub.oracle, z, inner);
        out.hvp_count += res.hvp_count;

        if (res.certificate == NewtonCgCertificate::early_exit_at_x0) {
            out.z = z;
            out.converged = true;
            out.outer_iterations = j + 1;
            return out;
        }
        IppmOuter rec;
        rec.j = j;
        rec.f_value = fz;
        rec.inner_iterations = static_cast<int>(res.trace.size());
        rec.inner_certificate = res.certificate;
        if (res.certificate == NewtonCgCertificate::max_iters) {
            out.z = z;
            out.outer_trace.push_back(rec);
            out.outer_iterations = j + 1;
            out.message = "inner Newton-CG failed at outer step " + std::to_string(j) + ": " + res.message;
            return out;
        }
        const double f_next = f.value(res.y).value();
        rec.prox_value = f_next + 0.5 * cfg.mu * (res.y - z).squaredNorm();
        out.outer_trace.push_back(rec);
        z = std::move(res.y);
        fz = f_next;
    }
    out.z = z;
    out.outer_iterations = max_outer;
    out.message = "outer iteration budget exhausted";
    return out;
}

/// nu tolerance sqrt(mu - ell) eps / (mu + kappa sqrt(mu - ell) eps) certifying
/// an eps-stationary point of the Moreau envelope.
inline double nu_threshold_for_moreau(double mu, double ell, double kappa, double eps) {
    if (!(mu > ell)) throw std::invalid_argument("nu_threshold_for_moreau: mu must exceed ell");
    if (!(eps > 0.0)) throw std::invalid_argument("nu_threshold_for_moreau: eps must be positive");
    const double s = std::sqrt(mu - ell) * eps;
    return s / (mu + kappa * s);
}

/// mu ||x - argmin_y (f(y) + (mu/2)||y - x||^2)||, with the prox point found by
/// Newton-CG to decrement tolerance inner_tol. Needs f + (mu/2)||.||^2 to be
/// kappa-self-concordant (kappa > 0).
inline double moreau_grad_norm(const Oracle& f, double ell, double mu, const Vector& x, double inner_tol,
                               double kappa = 1.0, std::uint64_t seed = 0) {
    if (!(mu > ell)) throw std::invalid_argument("moreau_grad_norm: mu must exceed ell");
    ProxSubproblem sub(f, x, mu);
    // condition bound from the exact spectrum at x, with head room for the path
    const Eigen::SelfAdjointEigenSolver<Matrix> es(sub.oracle.hessian(x), Eigen::EigenvaluesOnly);
    const double lo = std::max(es.eigenvalues().minCoeff(), mu - ell);
    const double cond = es.eigenvalues().maxCoeff() / lo;
    NewtonCgConfig cfg;
    cfg.kappa = kappa > 0.0 ? kappa : 1.0;
    cfg.eps0 = inner_tol;
    cfg.eps1 = inner_tol;
    cfg.beta = std::max(2.0 * std::sqrt(cond), 2.0);
    cfg.fail_prob = 1e-6;
    cfg.max_iters = 10000;
    cfg.seed = seed;
    const NewtonCgResult res = newton_cg_solve(sub.oracle, x, cfg);
    if (res.certificate == NewtonCgCertificate::max_iters)
        throw std::runtime_error("moreau_grad_norm: inner solve failed: " + res.message);
    return mu * (x - res.y).norm();
}

}  // namespace sconcord
