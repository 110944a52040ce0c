#pragma once

// Finite-difference checks of oracle derivatives and sampled verification of
// the self-concordance inequality |D^3 g[h,h,h]| <= 2 kappa (D^2 g[h,h])^{3/2}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "oracle.hpp"
#include "types.hpp"

namespace sconcord {

/// Draws a point from the interior of a problem's domain.
using Sampler = std::function<Vector(Rng&)>;

struct DerivativeReport {
    double gradient_error = 0.0;
    double hessian_error = 0.0;
    int directions = 0;

    bool passed(double tol) const { return gradient_error <= tol && hessian_error <= tol; }
};

namespace detail {

// Largest step eps' <= eps (halving at most 10 times) with x +- eps' h in the domain.
inline double fit_step(const Oracle& g, const Vector& x, const Vector& h, double eps) {
    for (int shrink = 0; shrink <= 10; ++shrink) {
        if (g.in_domain(x + eps * h) && g.in_domain(x - eps * h)) return eps;
        eps *= 0.5;
    }
    throw std::domain_error("finite difference: x +- eps h leaves the domain after 10 reductions");
}

}  // namespace detail

/// Central-difference check of gradient and Hessian along n_dirs random unit
/// directions. Errors are relative to max(||grad f||, 1e-8) and max(||H h||, 1e-8)
/// respectively (directional derivative errors are scaled by the full gradient
/// norm so that directions nearly orthogonal to the gradient are not penalized).
inline DerivativeReport check_derivatives(const Oracle& f, const Vector& x, int n_dirs, std::uint64_t seed) {
    if (!f.in_domain(x)) throw std::domain_error("check_derivatives: x outside the domain");
    if (n_dirs < 1) throw std::invalid_argument("check_derivatives: n_dirs must be positive");
    Rng rng(seed);
    const double base_eps = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm());
    const Vector grad = f.gradient(x);
    const double fx = f.value(x).value();

    DerivativeReport rep;
    rep.directions = n_dirs;
    for (int k = 0; k < n_dirs; ++k) {
        const Vector h = rng.unit_vector(x.size());
        const double eps = detail::fit_step(f, x, h, base_eps);
        const Vector xp = x + eps * h;
        const Vector xm = x - eps * h;

        const double fd1 = (f.value(xp).value() - f.value(xm).value()) / (2.0 * eps);
        const double scale1 = std::max({grad.norm(), 1e-8 * (1.0 + std::abs(fx))});
        rep.gradient_error = std::max(rep.gradient_error, std::abs(fd1 - grad.dot(h)) / scale1);

        const Vector fd2 = (f.gradient(xp) - f.gradient(xm)) / (2.0 * eps);
        const Vector hh = f.hvp(x, h);
        const double scale2 = std::max(hh.norm(), 1e-8 * (1.0 + grad.norm()));
        rep.hessian_error = std::max(rep.hessian_error, (fd2 - hh).norm() / scale2);
    }
    return rep;
}

/// Estimate of D^3 g(x)[h,h,h] by differencing the Hessian quadratic form.
///
/// Starts at eps = eps_mach^{1/4} (1 + ||x||) and applies one Richardson step to
/// the pair (eps, eps/2). Near a barrier boundary the quadratic form varies on a
/// scale much shorter than eps, so the step is halved until the two central
/// differences agree to 1e-3 relative to the natural scale (D^2 g[h,h])^{3/2}.
inline double third_directional(const Oracle& g, const Vector& x, const Vector& h) {
    if (!g.in_domain(x)) throw std::domain_error("third_directional: x outside the domain");
    const double q0 = std::max(g.curvature(x, h), 0.0);
    const double scale = std::pow(q0, 1.5) + 1e-300;
    double eps = std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + x.norm());
    eps = detail::fit_step(g, x, h, eps);

    auto central = [&](double e) {
        return (g.curvature(x + e * h, h) - g.curvature(x - e * h, h)) / (2.0 * e);
    };
    double coarse = central(eps);
    double best = coarse;
    for (int it = 0; it < 40; ++it) {
        const double fine = central(0.5 * eps);
        const double extrapolated = (4.0 * fine - coarse) / 3.0;
        best = extrapolated;
        if (std::abs(fine - coarse) <= 1e-3 * (std::abs(extrapolated) + scale)) break;
        eps *= 0.5;
        coarse = fine;
    }
    return best;
}

struct ScReport {
    bool passed = false;
    double worst_ratio = 0.0;
    int assumption_violations = 0;
    int sc_failures = 0;
    int samples = 0;
    std::optional<Vector> worst_point;
};

struct ScCheckOptions {
    int n_points = 10;
    int n_dirs = 10;
    std::uint64_t seed = 0;
    double slack = 1e-3;
};

/// Sampled check of the self-concordance inequality for f + F. A nonpositive
/// curvature sample is an Assumption-1 violation and is counted separately.
/// Pairs with kappa = 0 get an absolute floor of 1e-8 on the ratio to absorb
/// differencing noise on exact quadratics.
inline ScReport check_self_concordance(const ReferencePair& pair, const Sampler& sampler,
                                       const ScCheckOptions& opt = {}) {
    pair.validate();
    const Oracle g = pair.regularized(1.0);
    const double bound = pair.kappa * (1.0 + opt.slack) + (pair.kappa == 0.0 ? 1e-8 : 0.0);
    Rng rng(opt.seed);
    ScReport rep;
    for (int p = 0; p < opt.n_points; ++p) {
        const Vector x = sampler(rng);
        if (!g.in_domain(x)) throw std::domain_error("check_self_concordance: sampler left the domain");
        for (int k = 0; k < opt.n_dirs; ++k) {
            const Vector h = rng.unit_vector(x.size());
            ++rep.samples;
            const double q = g.curvature(x, h);
            if (!(q > 0.0)) {
                ++rep.assumption_violations;
                continue;
            }
            const double third = third_directional(g, x, h);
            const double ratio = std::abs(third) / (2.0 * std::pow(q, 1.5));
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.worst_point = x;
            }
            if (ratio > bound) ++rep.sc_failures;
        }
    }
    rep.passed = rep.assumption_violations == 0 && rep.sc_failures == 0;
    return rep;
}

struct WeightFit {
    double weight = 0.0;       // passing grid weight times the safety factor
    double grid_weight = 0.0;  // first passing grid weight
    int grid_steps = 0;
    ScReport report;
};

struct WeightFitOptions {
    double grid_start = 0.125;
    double grid_max = 1e12;
    double safety = 2.0;
    int sample_budget = 200;
    int n_dirs = 4;
    std::uint64_t seed = 0;
    double slack = 1e-3;
};

/// Smallest m on the doubling grid grid_start * 2^k with (f, m F) passing the
/// sampled check at the given kappa, multiplied by the safety factor.
inline WeightFit fit_reference_weight(const Oracle& f, const Oracle& unit_reference, double kappa,
                                      const Sampler& sampler, const WeightFitOptions& opt = {}) {
    WeightFit fit;
    ScCheckOptions sc;
    sc.n_points = opt.sample_budget;
    sc.n_dirs = opt.n_dirs;
    sc.seed = opt.seed;
    sc.slack = opt.slack;
    for (double m = opt.grid_start; m <= opt.grid_max; m *= 2.0) {
        ++fit.grid_steps;
        ReferencePair pair{f, scale(unit_reference, m), kappa, std::nullopt, std::nullopt};
        ScReport rep = check_self_concordance(pair, sampler, sc);
        if (rep.passed) {
            fit.grid_weight = m;
            fit.weight = opt.safety * m;
            fit.report = std::move(rep);
            return fit;
        }
    }
    throw std::runtime_error("fit_reference_weight: no passing weight up to " + std::to_string(opt.grid_max) +
                             " (degree bound likely violated)");
}

}  // namespace sconcord
