#pragma once

// Generalized phase retrieval f(x) = (1/2m) sum_k ((1/2)(u1_k^2 + u2_k^2) - y_k^2)^2
// with x = (z^R, z^I), u1_k = c1_k' x, u2_k = c2_k' x, c1 = (a^R, a^I), c2 = (-a^I, a^R).

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "../oracle.hpp"
#include "../verification.hpp"
#include "barrier.hpp"

namespace sconcord::problems {

struct PhaseRetrievalInstance {
    Matrix sensing_real;  // m-by-n, row k is a_k^R
    Matrix sensing_imag;  // m-by-n, row k is a_k^I
    Vector targets;       // y_k^2
    Vector planted;       // (z^R, z^I) used to generate the targets
    double ell = 0.0;
    double kappa = 4.0;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(sensing_real.cols()); }
    int m() const { return static_cast<int>(sensing_real.rows()); }
};

namespace detail {

// rows are c1_k' and c2_k'
inline std::pair<Matrix, Matrix> phase_rows(const PhaseRetrievalInstance& p) {
    const int m = p.m();
    const int n = p.n();
    Matrix c1(m, 2 * n);
    Matrix c2(m, 2 * n);
    c1 << p.sensing_real, p.sensing_imag;
    c2 << -p.sensing_imag, p.sensing_real;
    return {c1, c2};
}

}  // namespace detail

inline Oracle phase_objective(const PhaseRetrievalInstance& p) {
    auto [c1, c2] = detail::phase_rows(p);
    const Vector y2 = p.targets;
    const double inv_m = 1.0 / p.m();
    const Eigen::Index dim = 2 * p.n();
    Oracle::Callbacks cb;
    cb.value = [c1, c2, y2, inv_m](const Vector& x) {
        const Vector u1 = c1 * x;
        const Vector u2 = c2 * x;
        const Vector res = (0.5 * (u1.array().square() + u2.array().square())).matrix() - y2;
        return 0.5 * inv_m * res.squaredNorm();
    };
    cb.gradient = [c1, c2, y2, inv_m](const Vector& x) -> Vector {
        const Vector u1 = c1 * x;
        const Vector u2 = c2 * x;
        const Vector res = (0.5 * (u1.array().square() + u2.array().square())).matrix() - y2;
        return inv_m * (c1.transpose() * (res.array() * u1.array()).matrix() +
                        c2.transpose() * (res.array() * u2.array()).matrix());
    };
    cb.hessian = [c1, c2, y2, inv_m, dim](const Vector& x) -> Matrix {
        const Vector u1 = c1 * x;
        const Vector u2 = c2 * x;
        const Vector res = (0.5 * (u1.array().square() + u2.array().square())).matrix() - y2;
        Matrix h = Matrix::Zero(dim, dim);
        for (Eigen::Index k = 0; k < c1.rows(); ++k) {
            const Vector a = c1.row(k).transpose();
            const Vector b = c2.row(k).transpose();
            const Vector q = u1[k] * a + u2[k] * b;  // gradient of (1/2)(u1^2 + u2^2)
            h += q * q.transpose() + res[k] * (a * a.transpose() + b * b.transpose());
        }
        return inv_m * h;
    };
    cb.hvp = [c1, c2, y2, inv_m](const Vector& x, const Vector& v) -> Vector {
        const Vector u1 = c1 * x;
        const Vector u2 = c2 * x;
        const Vector w1 = c1 * v;
        const Vector w2 = c2 * v;
        const Vector res = (0.5 * (u1.array().square() + u2.array().square())).matrix() - y2;
        const Vector dq = (u1.array() * w1.array() + u2.array() * w2.array()).matrix();
        const Vector s1 = (dq.array() * u1.array() + res.array() * w1.array()).matrix();
        const Vector s2 = (dq.array() * u2.array() + res.array() * w2.array()).matrix();
        return inv_m * (c1.transpose() * s1 + c2.transpose() * s2);
    };
    return Oracle(dim, std::move(cb));
}

/// Weak self-concordance modulus for kappa = 4, times 2 for safety:
/// lambda_max(sum_k (y_k^2 / m)(c1 c1' + c2 c2')) convexifies the concave
/// quadratic part, and 0.1443 sqrt(M P) with M = max_k ||c1_k||^2 and
/// P = lambda_max(sum_k (c1 c1' + c2 c2') / m) covers the quartic part.
inline double phase_retrieval_ell(const PhaseRetrievalInstance& p) {
    auto [c1, c2] = detail::phase_rows(p);
    const int m = p.m();
    const Eigen::Index dim = 2 * p.n();
    Matrix weighted = Matrix::Zero(dim, dim);
    Matrix plain = Matrix::Zero(dim, dim);
    double big = 0.0;
    for (int k = 0; k < m; ++k) {
        const Matrix outer = c1.row(k).transpose() * c1.row(k) + c2.row(k).transpose() * c2.row(k);
        weighted += p.targets[k] / m * outer;
        plain += outer / m;
        big = std::max(big, c1.row(k).squaredNorm());
    }
    const double lw = Eigen::SelfAdjointEigenSolver<Matrix>(weighted, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double lp = Eigen::SelfAdjointEigenSolver<Matrix>(plain, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    return 2.0 * (lw + 0.1443 * std::sqrt(big * lp));
}

/// Standard normal sensing vectors and planted signal; targets are noise-free.
inline PhaseRetrievalInstance make_phase_retrieval(int n, int m, std::uint64_t seed) {
    if (n < 1 || m < 1) throw std::invalid_argument("make_phase_retrieval: n, m must be positive");
    Rng rng(seed);
    PhaseRetrievalInstance p;
    p.seed = seed;
    p.sensing_real.resize(m, n);
    p.sensing_imag.resize(m, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < m; ++k) p.sensing_real(k, j) = rng.normal();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < m; ++k) p.sensing_imag(k, j) = rng.normal();
    p.planted = rng.normal_vector(2 * n);
    auto [c1, c2] = detail::phase_rows(p);
    const Vector u1 = c1 * p.planted;
    const Vector u2 = c2 * p.planted;
    p.targets = (0.5 * (u1.array().square() + u2.array().square())).matrix();
    p.ell = phase_retrieval_ell(p);
    return p;
}

/// (f, (ell/2)||.||^2, kappa = 4); the quadratic reference is 0-self-concordant.
inline ReferencePair phase_oracles(const PhaseRetrievalInstance& p) {
    ReferencePair pair;
    pair.objective = phase_objective(p);
    pair.reference = scaled_square_norm(2 * p.n(), p.ell);
    pair.kappa = p.kappa;
    pair.kappa_ref = 0.0;
    pair.lower_bound_hint = 0.0;
    return pair;
}

/// Gaussian points scaled by the planted norm times a log-uniform factor in [1e-2, 1e1].
inline Sampler phase_sampler(const PhaseRetrievalInstance& p) {
    const double scale = std::max(p.planted.norm(), 1.0);
    const Eigen::Index dim = 2 * p.n();
    return [scale, dim](Rng& rng) -> Vector { return scale * rng.log_uniform(1e-2, 1e1) * rng.unit_vector(dim); };
}

inline Vector phase_initial_point(const PhaseRetrievalInstance& p, std::uint64_t seed) {
    Rng rng(seed);
    return rng.normal_vector(2 * p.n());
}

}  // namespace sconcord::problems
