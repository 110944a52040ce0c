#pragma once

// Invariant suites behind `sconcord verify`. Each check reports its worst
// observed margin so a pass can be judged by how close it came.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "numerics.hpp"
#include "problems/registry.hpp"
#include "scalar.hpp"
#include "verification.hpp"

namespace sconcord::suites {

struct Check {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // the quantity compared against the limit
    double limit = 0.0;
    std::string detail;
};

inline Check make_check(std::string name, double worst, double limit, std::string detail = {}) {
    return {std::move(name), worst <= limit, worst, limit, std::move(detail)};
}

inline std::vector<Check> scalar_identities() {
    std::vector<Check> out;
    // omega_star(z) = sup_t (z t - omega(t)), attained at t = z / (1 - z)
    double conj = 0.0;
    double above = 0.0;
    for (int i = 0; i <= 990; ++i) {
        const double z = i * 1e-3;
        const double t = z / (1.0 - z);
        const double ws = omega_star(z).value();
        conj = std::max(conj, std::abs(ws - (z * t - omega(t))));
        for (double s : {0.5 * t, 2.0 * t + 0.1, t + 1e-3})
            above = std::max(above, (z * s - omega(s)) - ws);
    }
    out.push_back(make_check("omega/omega_star conjugacy", conj, 1e-9));
    out.push_back(make_check("omega_star dominates z t - omega(t)", above, 1e-12));

    double qlb = 0.0;
    for (double g : {0.1, 1.0, 10.0})
        for (int i = 0; i <= 1000; ++i) {
            const double z = g * i / 1000.0;
            qlb = std::max(qlb, z * z / (2.0 * (1.0 + g)) - omega(z));
        }
    out.push_back(make_check("omega quadratic lower bound", qlb, 1e-15));

    double inv = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        const double t = 50.0 * i / 5000.0;
        inv = std::max(inv, std::abs(gamma_f(omega(t), 1.0) - t));
    }
    out.push_back(make_check("gamma_f inverts omega", inv, 1e-9));

    double mono = 0.0;
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(0.0, 20.0);
        const double b = a + rng.uniform(0.0, 5.0);
        mono = std::max(mono, omega(a) - omega(b));
        mono = std::max(mono, gamma_f(a, 1.5) - gamma_f(b, 1.5));
        const double za = a / 25.0;
        const double zb = std::min(b / 25.0, 0.999);
        if (zb >= za) mono = std::max(mono, omega_star(za).value() - omega_star(zb).value());
    }
    out.push_back(make_check("monotonicity of omega, omega_star, gamma_f", mono, 0.0));
    return out;
}

inline std::vector<problems::ProblemBundle> default_bundles(std::uint64_t seed = 1) {
    std::vector<problems::ProblemBundle> out;
    for (problems::ProblemKind k : problems::all_problems) out.push_back(problems::make_bundle(k, seed));
    return out;
}

inline std::vector<Check> derivatives(const std::vector<problems::ProblemBundle>& bundles) {
    std::vector<Check> out;
    for (const problems::ProblemBundle& b : bundles) {
        Rng rng(derive_seed(b.seed, 21));
        double worst = 0.0;
        double hv = 0.0;
        for (int i = 0; i < 10; ++i) {
            // keep the probe points moderate so differencing is well conditioned
            Vector x = b.sampler(rng);
            if (b.kind == problems::ProblemKind::nmf_mse || b.kind == problems::ProblemKind::nmf_kl ||
                b.kind == problems::ProblemKind::log_barrier_demo)
                for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = rng.uniform(0.1, 2.0);
            for (const Oracle* o : {&b.pair.objective, &b.pair.reference}) {
                const DerivativeReport rep = check_derivatives(*o, x, 4, derive_seed(b.seed, 100 + i));
                worst = std::max({worst, rep.gradient_error, rep.hessian_error});
            }
        }
        for (int i = 0; i < 20; ++i) {
            Vector x = b.sampler(rng);
            if (!b.pair.objective.in_domain(x)) continue;
            const Vector v = rng.normal_vector(x.size());
            const Matrix h = b.pair.objective.hessian(x);
            const double err = (h * v - b.pair.objective.hvp(x, v)).norm() / (1.0 + h.norm() * v.norm());
            hv = std::max(hv, err);
        }
        const std::string name = problems::to_string(b.kind);
        out.push_back(make_check(name + ": finite differences", worst, 1e-5));
        out.push_back(make_check(name + ": hessian/hvp consistency", hv, 1e-10));
    }
    return out;
}

inline std::vector<Check> self_concordance(const std::vector<problems::ProblemBundle>& bundles) {
    std::vector<Check> out;
    {
        // equality case: -log x in one dimension
        ReferencePair p;
        Oracle::Callbacks cb;
        cb.in_domain = [](const Vector& x) { return x[0] > 0.0; };
        cb.value = [](const Vector& x) { return -std::log(x[0]); };
        cb.gradient = [](const Vector& x) -> Vector { return Vector::Constant(1, -1.0 / x[0]); };
        cb.hessian = [](const Vector& x) -> Matrix { return Matrix::Constant(1, 1, 1.0 / (x[0] * x[0])); };
        p.objective = Oracle(1, std::move(cb));
        p.reference = zero_function(1);
        p.kappa = 1.0;
        const ScReport r = check_self_concordance(p, problems::orthant_sampler(1), {});
        out.push_back(make_check("-log x equality case |ratio - 1|", std::abs(r.worst_ratio - 1.0), 1e-4));
    }
    for (const problems::ProblemBundle& b : bundles) {
        ScCheckOptions opt;
        opt.seed = derive_seed(b.seed, 31);
        const ScReport r = check_self_concordance(b.pair, b.sampler, opt);
        const double excess = r.passed ? r.worst_ratio / b.pair.kappa : std::numeric_limits<double>::infinity();
        out.push_back(make_check(std::string(problems::to_string(b.kind)) + ": worst ratio / kappa", excess,
                                 1.0 + 1e-3,
                                 "assumption violations " + std::to_string(r.assumption_violations)));
    }
    return out;
}

/// Random SPD matrix Q diag(spec) Q'.
inline Matrix spd_with_spectrum(const Vector& spec, Rng& rng) {
    const Eigen::Index n = spec.size();
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) g.col(j) = rng.normal_vector(n);
    const Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = qr.householderQ();
    return q * spec.asDiagonal() * q.transpose();
}

inline std::vector<Check> numerics() {
    std::vector<Check> out;
    Rng rng(5);
    const double alpha = appendix_constants().alpha_star;
    double energy = 0.0;
    double sandwich = 0.0;
    double residual = 0.0;
    int lanczos_hits = 0;
    for (int s = 0; s < 100; ++s) {
        const int n = 5 + static_cast<int>(rng.uniform(0.0, 25.0));
        Vector spec(n);
        for (int i = 0; i < n; ++i) spec[i] = rng.log_uniform(1e-2, 1e2);
        const Matrix h = spd_with_spectrum(spec, rng);
        const Vector g = rng.normal_vector(n);
        const Vector exact = h.ldlt().solve(g);
        const double ginv = g.dot(exact);
        const double beta = std::sqrt(spec.maxCoeff() / spec.minCoeff());
        const CgResult cg = cg_inverse(LinearOperator::from_matrix(h), g, std::max(beta, 1.0 + 1e-9), alpha);
        const Vector e = cg.solution - exact;
        energy = std::max(energy, std::sqrt(std::max(e.dot(h * e), 0.0)) - alpha * std::sqrt(ginv));
        const double hg = cg.solution.dot(g);
        sandwich = std::max({sandwich, (1.0 - alpha) * ginv - hg, hg - (1.0 + alpha) * ginv});
        const PdSolveResult pd = solve_pd(h, g);
        residual = std::max(residual, (h * pd.solution - g).norm() / (1.0 + g.norm()));
        const EigenEstimate hi =
            lanczos_extreme(LinearOperator::from_matrix(h), EigenMode::largest, {.rel_tol = 1.0 / 3.0, .fail_prob = 1e-3, .seed = derive_seed(9, s)});
        if (std::abs(hi.value - spec.maxCoeff()) <= spec.maxCoeff() / 3.0) ++lanczos_hits;
    }
    out.push_back(make_check("CG energy-norm bound (excess)", energy, 1e-12));
    out.push_back(make_check("CG sandwich (excess)", sandwich, 1e-12));
    out.push_back(make_check("solve_pd relative residual", residual, 1e-10));
    out.push_back(make_check("Lanczos largest within 1/3 (misses of 100)", 100.0 - lanczos_hits, 5.0));
    return out;
}

inline bool all_passed(const std::vector<Check>& checks) {
    for (const Check& c : checks)
        if (!c.passed) return false;
    return true;
}

}  // namespace sconcord::suites
