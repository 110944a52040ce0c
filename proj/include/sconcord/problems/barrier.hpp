#pragma once

// Separable barrier problems on the positive orthant and the smoothed absolute value.

#include <cmath>
#include <stdexcept>

#include "../oracle.hpp"
#include "../verification.hpp"

namespace sconcord::problems {

inline bool all_positive(const Vector& x) { return (x.array() > 0.0).all(); }

/// -sum_i w_i log x_i on the positive orthant.
inline Oracle weighted_log_barrier(const Vector& w) {
    const Eigen::Index n = w.size();
    Oracle::Callbacks cb;
    cb.in_domain = all_positive;
    cb.value = [w](const Vector& x) { return -(w.array() * x.array().log()).sum(); };
    cb.gradient = [w](const Vector& x) -> Vector { return -(w.array() / x.array()).matrix(); };
    cb.hvp = [w](const Vector& x, const Vector& v) -> Vector {
        return (w.array() * v.array() / x.array().square()).matrix();
    };
    cb.hessian = [w, n](const Vector& x) -> Matrix {
        Matrix h = Matrix::Zero(n, n);
        h.diagonal() = (w.array() / x.array().square()).matrix();
        return h;
    };
    return Oracle(n, std::move(cb));
}

/// (c/2) ||x||^2.
inline Oracle scaled_square_norm(Eigen::Index n, double c) { return prox_quadratic(Vector::Zero(n), c); }

/// f(x) = sum_i (x_i - log x_i); minimizer x = 1, f* = n, 1-self-concordant.
inline Oracle log_barrier_demo(Eigen::Index n) {
    Oracle::Callbacks cb;
    cb.in_domain = all_positive;
    cb.value = [](const Vector& x) { return (x.array() - x.array().log()).sum(); };
    cb.gradient = [](const Vector& x) -> Vector { return (1.0 - 1.0 / x.array()).matrix(); };
    cb.hvp = [](const Vector& x, const Vector& v) -> Vector { return (v.array() / x.array().square()).matrix(); };
    cb.hessian = [n](const Vector& x) -> Matrix {
        Matrix h = Matrix::Zero(n, n);
        h.diagonal() = (1.0 / x.array().square()).matrix();
        return h;
    };
    return Oracle(n, std::move(cb));
}

/// f(x) = (1/2) sum_i a_i (x_i - 1)^2 + sum_i (x_i - log x_i); minimizer x = 1, f* = n.
inline Oracle barrier_quadratic(const Vector& a) {
    const Eigen::Index n = a.size();
    Oracle::Callbacks cb;
    cb.in_domain = all_positive;
    cb.value = [a](const Vector& x) {
        return 0.5 * (a.array() * (x.array() - 1.0).square()).sum() + (x.array() - x.array().log()).sum();
    };
    cb.gradient = [a](const Vector& x) -> Vector {
        return (a.array() * (x.array() - 1.0) + 1.0 - 1.0 / x.array()).matrix();
    };
    cb.hvp = [a](const Vector& x, const Vector& v) -> Vector {
        return ((a.array() + 1.0 / x.array().square()) * v.array()).matrix();
    };
    cb.hessian = [a, n](const Vector& x) -> Matrix {
        Matrix h = Matrix::Zero(n, n);
        h.diagonal() = (a.array() + 1.0 / x.array().square()).matrix();
        return h;
    };
    return Oracle(n, std::move(cb));
}

/// Componentwise log-uniform sampler on [lo, hi]^n.
inline Sampler orthant_sampler(Eigen::Index n, double lo = 1e-2, double hi = 1e1) {
    return [n, lo, hi](Rng& rng) -> Vector {
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.log_uniform(lo, hi);
        return x;
    };
}

struct SmoothAbsValue {
    double value;
    double first;
    double second;
    double third;
};

/// h(x) = (log(1 + e^{ax}) + log(1 + e^{-ax})) / a, evaluated as
/// |x| + (2/a) log1p(e^{-a|x|}) so that large |a x| cannot overflow.
inline SmoothAbsValue smooth_abs_eval(double alpha, double x) {
    if (!(alpha > 0.0)) throw std::invalid_argument("smooth_abs_eval: alpha must be positive");
    const double ax = std::abs(alpha * x);
    const double th = std::tanh(0.5 * alpha * x);
    const double ch = std::cosh(0.5 * alpha * x);
    SmoothAbsValue out{};
    out.value = std::abs(x) + 2.0 / alpha * std::log1p(std::exp(-ax));
    out.first = th;
    out.second = 0.5 * alpha * (1.0 - th * th);
    out.third = std::isfinite(ch) ? -alpha * alpha * th / (2.0 * ch * ch) : 0.0;
    return out;
}

/// sum_i h_alpha(x_i) as an oracle on R^n.
inline Oracle smooth_abs_sum(Eigen::Index n, double alpha) {
    Oracle::Callbacks cb;
    cb.value = [alpha](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += smooth_abs_eval(alpha, x[i]).value;
        return s;
    };
    cb.gradient = [alpha](const Vector& x) -> Vector {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = smooth_abs_eval(alpha, x[i]).first;
        return g;
    };
    cb.hvp = [alpha](const Vector& x, const Vector& v) -> Vector {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = smooth_abs_eval(alpha, x[i]).second * v[i];
        return out;
    };
    return Oracle(n, std::move(cb));
}

}  // namespace sconcord::problems
