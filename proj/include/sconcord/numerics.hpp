#pragma once

// Dense symmetric linear algebra used by the solvers: a positive-definite solve
// with one refinement pass, Lanczos extreme-eigenvalue estimation with full
// reorthogonalization, the sqrt-cond estimator, and fixed-budget CG.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "types.hpp"

namespace sconcord {

/// Symmetric linear operator given by its action, with a known dimension.
struct LinearOperator {
    Eigen::Index dim = 0;
    std::function<Vector(const Vector&)> apply;

    static LinearOperator from_matrix(const Matrix& a) {
        if (a.rows() != a.cols()) throw std::invalid_argument("LinearOperator: matrix must be square");
        return {a.rows(), [a](const Vector& v) -> Vector { return a * v; }};
    }
};

struct PdSolveResult {
    Vector solution;
    bool success = false;
    double smallest_pivot = 0.0;
};

/// Solves H s = g by Cholesky with one iterative-refinement pass. Fails (success =
/// false) when a pivot is not safely positive.
inline PdSolveResult solve_pd(const Matrix& h, const Vector& g) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n || g.size() != n) throw std::invalid_argument("solve_pd: dimension mismatch");

    PdSolveResult out;
    const double scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double pivot_floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

    Matrix l = Matrix::Zero(n, n);
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double pivot = h(j, j) - l.row(j).head(j).squaredNorm();
        smallest = std::min(smallest, pivot);
        if (!(pivot > pivot_floor)) {
            out.smallest_pivot = pivot;
            return out;
        }
        const double root = std::sqrt(pivot);
        l(j, j) = root;
        const Eigen::Index rest = n - j - 1;
        if (rest > 0) {
            l.col(j).tail(rest) =
                (h.col(j).tail(rest) - l.bottomLeftCorner(rest, j) * l.row(j).head(j).transpose()) / root;
        }
    }
    out.smallest_pivot = smallest;

    auto solve = [&l](const Vector& rhs) -> Vector {
        const Vector y = l.triangularView<Eigen::Lower>().solve(rhs);
        return l.transpose().triangularView<Eigen::Upper>().solve(y);
    };
    Vector s = solve(g);
    s += solve(g - h * s);
    if (!s.allFinite()) return out;
    out.solution = std::move(s);
    out.success = true;
    return out;
}

struct EigenEstimate {
    double value = 0.0;
    Vector vector;
    double relative_error_target = 0.0;
    int iterations_used = 0;
    bool converged = true;
};

enum class EigenMode { largest, smallest };

struct LanczosOptions {
    double rel_tol = 1.0 / 3.0;
    double fail_prob = 1e-6;
    int max_iters = std::numeric_limits<int>::max();
    std::uint64_t seed = 0;
    /// Caller's bound beta >= sqrt(cond(A)); used by the smallest-mode shift.
    double beta_bound = 0.0;
    /// Optional estimate of lambda_max reused by the smallest-mode shift.
    std::optional<double> lambda_max_hint;
};

/// Lanczos iteration budget C_L * ceil(rel_tol^{-1/2} log(n / fail_prob^2)), capped at n.
inline int lanczos_budget(Eigen::Index n, double rel_tol, double fail_prob, int max_iters) {
    constexpr double kLanczosConstant = 8.0;
    double want = static_cast<double>(n);
    if (fail_prob > 0.0 && rel_tol > 0.0) {
        const double per = std::ceil(std::log(static_cast<double>(n) / (fail_prob * fail_prob)) /
                                     std::sqrt(rel_tol));
        want = std::min(want, kLanczosConstant * std::max(per, 1.0));
    }
    const double capped = std::min({want, static_cast<double>(n), static_cast<double>(max_iters)});
    return std::max(1, static_cast<int>(capped));
}

namespace detail {

/// Largest algebraic eigenpair of a symmetric operator by Lanczos with full
/// reorthogonalization from a seeded random start.
inline EigenEstimate lanczos_largest(const LinearOperator& op, double rel_tol, double fail_prob,
                                     int max_iters, std::uint64_t seed) {
    const Eigen::Index n = op.dim;
    if (n <= 0) throw std::invalid_argument("lanczos: empty operator");
    const int budget = lanczos_budget(n, rel_tol, fail_prob, max_iters);

    Rng rng(seed);
    Matrix q(n, budget);
    std::vector<double> alpha;
    std::vector<double> beta;
    alpha.reserve(budget);
    beta.reserve(budget);

    q.col(0) = rng.unit_vector(n);
    double t_scale = 0.0;
    int k = 0;
    for (; k < budget; ++k) {
        Vector w = op.apply(q.col(k));
        const double a = q.col(k).dot(w);
        alpha.push_back(a);
        t_scale = std::max(t_scale, std::abs(a));
        // two passes of classical Gram-Schmidt against the whole basis
        for (int pass = 0; pass < 2; ++pass) {
            const auto basis = q.leftCols(k + 1);
            w -= basis * (basis.transpose() * w);
        }
        const double b = w.norm();
        if (k + 1 == budget) break;
        if (b <= 1e-12 * std::max(t_scale, 1e-300)) {
            ++k;
            break;
        }
        beta.push_back(b);
        t_scale = std::max(t_scale, b);
        q.col(k + 1) = w / b;
    }
    const int used = static_cast<int>(alpha.size());

    Vector diag = Eigen::Map<const Vector>(alpha.data(), used);
    Vector sub = used > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), used - 1)) : Vector();
    Eigen::SelfAdjointEigenSolver<Matrix> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

    EigenEstimate out;
    out.value = tri.eigenvalues()[used - 1];
    Vector ritz = q.leftCols(used) * tri.eigenvectors().col(used - 1);
    out.vector = ritz / ritz.norm();
    out.relative_error_target = rel_tol;
    out.iterations_used = used;
    out.converged = out.vector.allFinite() && std::isfinite(out.value);
    return out;
}

}  // namespace detail

/// Extreme eigenvalue estimate of a symmetric operator.
///
/// largest: Lanczos on A directly. smallest (A positive definite): the shift
/// construction lambda_2 = s - lambda_max(sI - A) with s = 2 lambda_1 / (1 - eps'),
/// eps' = rel_tol * 3 / (10 beta^2), so rel_tol = 1/3 reproduces eps' = 1/(10 beta^2).
inline EigenEstimate lanczos_extreme(const LinearOperator& op, EigenMode mode, const LanczosOptions& opt) {
    if (mode == EigenMode::largest) {
        return detail::lanczos_largest(op, opt.rel_tol, opt.fail_prob, opt.max_iters, opt.seed);
    }
    if (!(opt.beta_bound >= 1.0))
        throw std::invalid_argument("lanczos_extreme: smallest mode needs beta_bound >= 1");
    int iterations = 0;
    double lambda1 = 0.0;
    if (opt.lambda_max_hint) {
        lambda1 = *opt.lambda_max_hint;
    } else {
        const EigenEstimate top =
            detail::lanczos_largest(op, 1.0 / 3.0, opt.fail_prob, opt.max_iters, derive_seed(opt.seed, 1));
        lambda1 = top.value;
        iterations += top.iterations_used;
    }
    const double eps_shift = opt.rel_tol * 3.0 / (10.0 * opt.beta_bound * opt.beta_bound);
    const double shift = 2.0 * lambda1 / (1.0 - eps_shift);
    LinearOperator shifted{op.dim, [&op, shift](const Vector& v) -> Vector { return shift * v - op.apply(v); }};
    EigenEstimate inner =
        detail::lanczos_largest(shifted, eps_shift, opt.fail_prob, opt.max_iters, derive_seed(opt.seed, 2));
    inner.value = shift - inner.value;
    inner.iterations_used += iterations;
    inner.relative_error_target = opt.rel_tol;
    return inner;
}

/// Smallest algebraic eigenpair of a symmetric (possibly indefinite) operator,
/// computed as the largest eigenpair of -A.
inline EigenEstimate min_eigenpair(const LinearOperator& op, double rel_tol, double fail_prob,
                                   std::uint64_t seed, int max_iters = std::numeric_limits<int>::max()) {
    LinearOperator neg{op.dim, [&op](const Vector& v) -> Vector { return -op.apply(v); }};
    EigenEstimate e = detail::lanczos_largest(neg, rel_tol, fail_prob, max_iters, seed);
    e.value = -e.value;
    return e;
}

struct SqrtCondResult {
    double value = 0.0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    int matvecs = 0;
};

/// Returns sqrt(2 lambda_1 / lambda_2) from Lanczos estimates of the extreme
/// eigenvalues. With probability >= 1 - fail_prob the result lies in
/// [sqrt(cond A), 2 sqrt(cond A)] when beta_bound >= sqrt(cond A).
inline SqrtCondResult sqrt_cond(const LinearOperator& op, double fail_prob, double beta_bound,
                                std::uint64_t seed) {
    LanczosOptions opt;
    opt.rel_tol = 1.0 / 3.0;
    opt.fail_prob = 0.5 * fail_prob;
    opt.seed = derive_seed(seed, 11);
    opt.beta_bound = std::max(beta_bound, 1.0);
    const EigenEstimate top = lanczos_extreme(op, EigenMode::largest, opt);
    opt.lambda_max_hint = top.value;
    opt.seed = derive_seed(seed, 12);
    const EigenEstimate bottom = lanczos_extreme(op, EigenMode::smallest, opt);

    SqrtCondResult out;
    out.lambda_max = top.value;
    out.lambda_min = bottom.value;
    out.matvecs = top.iterations_used + bottom.iterations_used;
    if (!(bottom.value > 0.0) || !(top.value > 0.0)) {
        throw std::domain_error("sqrt_cond: operator is not numerically positive definite");
    }
    out.value = std::sqrt(2.0 * top.value / bottom.value);
    return out;
}

namespace detail {

inline double cg_log_count(double beta, double alpha) {
    if (!(beta > 1.0)) throw std::invalid_argument("cg_inverse: beta must exceed 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cg_inverse: alpha must lie in (0, 1)");
    const double base = (beta - 1.0) / (beta + 1.0);
    return std::max(std::floor(std::log(0.5 * alpha) / std::log(base)) + 1.0, 1.0);
}

}  // namespace detail

/// Iteration count min{n, floor(log_{(beta-1)/(beta+1)}(alpha / 2)) + 1}.
inline int cg_iteration_count(Eigen::Index n, double beta, double alpha) {
    return static_cast<int>(std::min(static_cast<double>(n), detail::cg_log_count(beta, alpha)));
}

struct CgResult {
    Vector solution;
    int iterations = 0;
};

/// Conjugate gradient for H h = g from h = 0.
///
/// The min{n, .} cap of cg_iteration_count is finite termination in exact
/// arithmetic; in floating point CG on a spread spectrum is still far off after
/// n steps. So the loop may run past n, up to the uncapped count, and stops as
/// soon as ||r|| <= alpha ||g|| / beta. With beta >= sqrt(cond H) that residual
/// already certifies ||h - H^{-1} g||_H <= alpha ||g||_{H^{-1}}.
inline CgResult cg_inverse(const LinearOperator& h_op, const Vector& g, double beta, double alpha) {
    const Eigen::Index n = h_op.dim;
    if (g.size() != n) throw std::invalid_argument("cg_inverse: dimension mismatch");
    const double uncapped = detail::cg_log_count(beta, alpha);
    const long budget = static_cast<long>(std::min(uncapped, 1e7));
    const double stop = alpha * g.norm() / beta;

    CgResult out;
    out.solution = Vector::Zero(n);
    Vector r = g;
    Vector p = r;
    double rr = r.squaredNorm();
    for (long k = 0; k < budget; ++k) {
        if (std::sqrt(rr) <= stop) break;
        const Vector hp = h_op.apply(p);
        ++out.iterations;
        const double curv = p.dot(hp);
        if (!(curv > 0.0)) break;
        const double step = rr / curv;
        out.solution += step * p;
        r -= step * hp;
        const double rr_next = r.squaredNorm();
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    return out;
}

}  // namespace sconcord
