#pragma once

// Scalar machinery for self-concordant descent estimates: the conjugate pair
// omega(z) = z - log(1+z), omega_star(z) = -z - log(1-z), the level radius
// gamma_f, and the absolute constants used by the Newton-CG analysis.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "types.hpp"

namespace sconcord {

struct AppendixConstants {
    double alpha_star;
    double r1;
    double r2;
    double r3;
    double c1;
    double c2;
    double c3;
};

inline const AppendixConstants& appendix_constants() {
    static const AppendixConstants k = [] {
        AppendixConstants c{};
        c.alpha_star = 0.0001;
        c.r1 = 0.49;
        c.r2 = c.r1 / std::sqrt(1.0 - c.alpha_star);
        c.r3 = std::sqrt(1.0 - c.alpha_star) / (1.0 + c.alpha_star) * c.r1;
        c.c1 = 9.0;
        c.c2 = 0.95;
        c.c3 = (1.0 / c.r2 - 1.0) / (1.0 / c.r2 - 2.0);
        return c;
    }();
    return k;
}

namespace detail {

inline void require_nonneg(double z, const char* what) {
    if (!(z >= 0.0)) throw std::domain_error(std::string(what) + ": argument must be >= 0");
}

// sum_{k>=2} s^k z^k / k for small z: s = -1 gives omega, s = +1 gives omega_star.
inline double log_tail_series(double z, double sign) {
    double term = z * z;
    double sum = 0.0;
    double coeff = 1.0;
    for (int k = 2; k <= 12; ++k) {
        sum += coeff * term / k;
        term *= z;
        coeff *= sign;
    }
    return sum;
}

}  // namespace detail

inline double omega(double z) {
    detail::require_nonneg(z, "omega");
    if (z < 1e-2) {
        return detail::log_tail_series(z, -1.0);
    }
    return z - std::log1p(z);
}

/// omega_star(z) is +inf for z >= 1 - 1e-14.
inline ExtendedReal omega_star(double z) {
    detail::require_nonneg(z, "omega_star");
    if (z >= 1.0 - 1e-14) return ExtendedReal::infinity();
    if (z < 1e-2) {
        return ExtendedReal(detail::log_tail_series(z, 1.0));
    }
    return ExtendedReal(-z - std::log1p(-z));
}

/// kappa^{-2} omega(kappa s), with the kappa -> 0 limit s^2 / 2.
inline double scaled_omega(double kappa, double s) {
    detail::require_nonneg(s, "scaled_omega");
    if (kappa == 0.0) return 0.5 * s * s;
    return omega(kappa * s) / (kappa * kappa);
}

/// kappa^{-2} omega_star(kappa s), with the kappa -> 0 limit s^2 / 2.
inline ExtendedReal scaled_omega_star(double kappa, double s) {
    detail::require_nonneg(s, "scaled_omega_star");
    if (kappa == 0.0) return ExtendedReal(0.5 * s * s);
    const ExtendedReal w = omega_star(kappa * s);
    if (w.is_infinite()) return w;
    return ExtendedReal(w.value() / (kappa * kappa));
}

/// The unique t >= 0 with omega(t) = kappa^2 * gap, to absolute tolerance 1e-12.
inline double gamma_f(double gap, double kappa) {
    detail::require_nonneg(gap, "gamma_f gap");
    detail::require_nonneg(kappa, "gamma_f kappa");
    const double target = kappa * kappa * gap;
    if (target == 0.0) return 0.0;
    if (!std::isfinite(target)) return std::numeric_limits<double>::infinity();

    double lo = 0.0;
    double hi = 1.0;
    while (omega(hi) < target) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (omega(mid) < target) lo = mid;
        else hi = mid;
    }
    // Newton polish on omega(t) - target, omega'(t) = t / (1 + t).
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double slope = t / (1.0 + t);
        if (slope <= 0.0) break;
        const double next = t - (omega(t) - target) / slope;
        if (!(next >= lo && next <= hi)) break;
        t = next;
    }
    return t;
}

}  // namespace sconcord
