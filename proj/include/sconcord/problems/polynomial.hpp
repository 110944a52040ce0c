#pragma once

// Polynomial references F(x) = (||x||^2 + 1)^p and the two-dimensional saddle
// f(x) = x1^2 - x2^2 + x2^4.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "../oracle.hpp"
#include "../verification.hpp"

namespace sconcord::problems {

/// F(x) = (||x||^2 + 1)^p on R^n.
inline Oracle polynomial_reference(Eigen::Index n, int p) {
    if (p < 1) throw std::invalid_argument("polynomial_reference: p must be >= 1");
    Oracle::Callbacks cb;
    cb.value = [p](const Vector& x) { return std::pow(x.squaredNorm() + 1.0, p); };
    cb.gradient = [p](const Vector& x) -> Vector {
        return 2.0 * p * std::pow(x.squaredNorm() + 1.0, p - 1) * x;
    };
    cb.hvp = [p](const Vector& x, const Vector& v) -> Vector {
        const double s = x.squaredNorm() + 1.0;
        Vector out = 2.0 * p * std::pow(s, p - 1) * v;
        if (p >= 2) out += 4.0 * p * (p - 1) * std::pow(s, p - 2) * x.dot(v) * x;
        return out;
    };
    cb.hessian = [n, p](const Vector& x) -> Matrix {
        const double s = x.squaredNorm() + 1.0;
        Matrix h = 2.0 * p * std::pow(s, p - 1) * Matrix::Identity(n, n);
        if (p >= 2) h += 4.0 * p * (p - 1) * std::pow(s, p - 2) * (x * x.transpose());
        return h;
    };
    return Oracle(n, std::move(cb));
}

/// Self-concordance constant of (||x||^2 + 1)^p, attained along radial
/// directions: max over r >= 0 of |phi'''| / (2 phi''^{3/2}) for phi(r) = (r^2 + 1)^p,
/// located by golden-section search on the unimodal ratio.
inline double polynomial_reference_kappa(int p) {
    if (p < 2) return 0.0;
    auto ratio = [p](double r) {
        const double s = r * r + 1.0;
        const double d2 = 2.0 * p * std::pow(s, p - 1) + 4.0 * p * (p - 1) * r * r * std::pow(s, p - 2);
        // d/dr of d2
        double d3 = 4.0 * p * (p - 1) * std::pow(s, p - 2) * r * 3.0;
        if (p >= 3) d3 += 8.0 * p * (p - 1) * (p - 2) * r * r * r * std::pow(s, p - 3);
        return std::abs(d3) / (2.0 * std::pow(d2, 1.5));
    };
    double lo = 0.0;
    double hi = 4.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
        const double a = hi - g * (hi - lo);
        const double b = lo + g * (hi - lo);
        if (ratio(a) < ratio(b)) lo = a;
        else hi = b;
    }
    return ratio(0.5 * (lo + hi));
}

/// f(x) = x1^2 - x2^2 + x2^4, saddle at 0, minima at (0, +-1/sqrt(2)) with f = -1/4.
inline Oracle saddle_objective() {
    Oracle::Callbacks cb;
    cb.value = [](const Vector& x) { return x[0] * x[0] - x[1] * x[1] + std::pow(x[1], 4); };
    cb.gradient = [](const Vector& x) -> Vector {
        Vector g(2);
        g << 2.0 * x[0], -2.0 * x[1] + 4.0 * std::pow(x[1], 3);
        return g;
    };
    cb.hessian = [](const Vector& x) -> Matrix {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = 2.0;
        h(1, 1) = -2.0 + 12.0 * x[1] * x[1];
        return h;
    };
    return Oracle(2, std::move(cb));
}

/// Radial sampler x = r u with r log-uniform on [1e-2, 1e2], u uniform on the sphere.
inline Sampler radial_sampler(Eigen::Index n) {
    return [n](Rng& rng) -> Vector {
        const double r = rng.log_uniform(1e-2, 1e2);
        return r * rng.unit_vector(n);
    };
}

struct PolynomialReference {
    int degree_bound = 4;  // 2p
    double weight = 0.0;   // m
    Oracle reference;      // m (||x||^2 + 1)^p
    double kappa_ref = 0.0;
    WeightFit fit;
};

/// Smallest doubling-grid m (times 2) such that f + m (||x||^2 + 1)^p passes the
/// sampled 1-self-concordance check.
inline PolynomialReference polynomial_reference_fit(const Oracle& f, int p, int sample_budget, std::uint64_t seed,
                                                    const Sampler& sampler = {}) {
    if (p < 2) throw std::invalid_argument("polynomial_reference_fit: p must be >= 2");
    WeightFitOptions opt;
    opt.sample_budget = sample_budget;
    opt.seed = seed;
    opt.grid_start = 0.125;
    const Oracle unit = polynomial_reference(f.dim(), p);
    PolynomialReference out;
    out.fit = fit_reference_weight(f, unit, 1.0, sampler ? sampler : radial_sampler(f.dim()), opt);
    out.degree_bound = 2 * p;
    out.weight = out.fit.weight;
    out.reference = scale(unit, out.weight);
    out.kappa_ref = polynomial_reference_kappa(p) / std::sqrt(out.weight);
    return out;
}

}  // namespace sconcord::problems
