#pragma once

// Nonnegative matrix factorization Z ~ X Y with Frobenius (MSE) or KL loss.
// The variable is v = [vec(X); vec(Y)], column-major, X m-by-r, Y r-by-n.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "../oracle.hpp"
#include "../verification.hpp"
#include "barrier.hpp"
#include "polynomial.hpp"

namespace sconcord::problems {

enum class NmfLoss { frobenius, kl };

inline const char* to_string(NmfLoss l) { return l == NmfLoss::frobenius ? "frobenius" : "kl"; }

struct NmfInstance {
    Matrix z;
    int m = 0;
    int n = 0;
    int r = 0;
    NmfLoss loss = NmfLoss::frobenius;
    // frobenius: ell, scaling the whole reference; kl: tau, the per-term barrier weight
    double barrier_weight = 0.0;
    // coefficient of (||X||^2 + ||Y||^2 + 1)^2 (frobenius: equal to ell)
    double quartic_weight = 0.0;
    std::optional<double> optimal_value_hint;
    std::uint64_t seed = 0;
    double noise = 0.0;
    // generating factors, kept for diagnostics and round-trips
    Matrix x_hat;
    Matrix y_hat;
    bool weights_fitted = false;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(m) * r + static_cast<Eigen::Index>(r) * n; }
};

namespace detail {

struct Factors {
    Eigen::Map<const Matrix> x;
    Eigen::Map<const Matrix> y;
};

inline Factors unpack(const Vector& v, int m, int n, int r) {
    return {Eigen::Map<const Matrix>(v.data(), m, r), Eigen::Map<const Matrix>(v.data() + m * r, r, n)};
}

inline Vector pack(const Matrix& gx, const Matrix& gy) {
    Vector out(gx.size() + gy.size());
    out.head(gx.size()) = Eigen::Map<const Vector>(gx.data(), gx.size());
    out.tail(gy.size()) = Eigen::Map<const Vector>(gy.data(), gy.size());
    return out;
}

}  // namespace detail

inline Vector pack_factors(const Matrix& x, const Matrix& y) { return detail::pack(x, y); }

/// f1 = (1/(2mn)) ||Z - X Y||_F^2 on the positive orthant.
inline Oracle nmf_mse_objective(const Matrix& z, int r) {
    const int m = static_cast<int>(z.rows());
    const int n = static_cast<int>(z.cols());
    const double c = 1.0 / (static_cast<double>(m) * n);
    Oracle::Callbacks cb;
    cb.in_domain = all_positive;
    cb.value = [z, m, n, r, c](const Vector& v) {
        const auto f = detail::unpack(v, m, n, r);
        return 0.5 * c * (f.x * f.y - z).squaredNorm();
    };
    cb.gradient = [z, m, n, r, c](const Vector& v) -> Vector {
        const auto f = detail::unpack(v, m, n, r);
        const Matrix res = f.x * f.y - z;
        return c * detail::pack(res * f.y.transpose(), f.x.transpose() * res);
    };
    cb.hvp = [z, m, n, r, c](const Vector& v, const Vector& d) -> Vector {
        const auto f = detail::unpack(v, m, n, r);
        const auto u = detail::unpack(d, m, n, r);
        const Matrix res = f.x * f.y - z;
        const Matrix dres = u.x * f.y + f.x * u.y;
        return c * detail::pack(dres * f.y.transpose() + res * u.y.transpose(),
                                f.x.transpose() * dres + u.x.transpose() * res);
    };
    return Oracle(static_cast<Eigen::Index>(m) * r + static_cast<Eigen::Index>(r) * n, std::move(cb));
}

/// f2 = (1/(mn)) sum_ij D(Z_ij || (XY)_ij), D(a||b) = a log(a/b) - a + b, with
/// the convention 0 log 0 = 0 for empty entries.
inline Oracle nmf_kl_objective(const Matrix& z, int r) {
    const int m = static_cast<int>(z.rows());
    const int n = static_cast<int>(z.cols());
    const double c = 1.0 / (static_cast<double>(m) * n);
    Oracle::Callbacks cb;
    cb.in_domain = all_positive;
    cb.value = [z, m, n, r, c](const Vector& v) {
        const auto f = detail::unpack(v, m, n, r);
        const Matrix s = f.x * f.y;
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < m; ++i) {
                const double a = z(i, j);
                total += a > 0.0 ? a * std::log(a / s(i, j)) - a + s(i, j) : s(i, j);
            }
        }
        return c * total;
    };
    cb.gradient = [z, m, n, r, c](const Vector& v) -> Vector {
        const auto f = detail::unpack(v, m, n, r);
        const Matrix s = f.x * f.y;
        const Matrix w = c * (1.0 - z.array() / s.array()).matrix();
        return detail::pack(w * f.y.transpose(), f.x.transpose() * w);
    };
    cb.hvp = [z, m, n, r, c](const Vector& v, const Vector& d) -> Vector {
        const auto f = detail::unpack(v, m, n, r);
        const auto u = detail::unpack(d, m, n, r);
        const Matrix s = f.x * f.y;
        const Matrix w = c * (1.0 - z.array() / s.array()).matrix();
        const Matrix ds = u.x * f.y + f.x * u.y;
        const Matrix dw = c * (z.array() / s.array().square() * ds.array()).matrix();
        return detail::pack(dw * f.y.transpose() + w * u.y.transpose(), f.x.transpose() * dw + u.x.transpose() * w);
    };
    return Oracle(static_cast<Eigen::Index>(m) * r + static_cast<Eigen::Index>(r) * n, std::move(cb));
}

/// (1/(mn)) sum_ij (XY)_ij, the bilinear part of the KL loss.
inline Oracle nmf_bilinear_part(int m, int n, int r) {
    return nmf_kl_objective(Matrix::Zero(m, n), r);
}

/// Barrier weights for the KL reference: X_ik gets tau * #{j : Z_ij > 0},
/// Y_kj gets tau * #{i : Z_ij > 0}.
inline Vector kl_barrier_weights(const Matrix& z, int r, double tau) {
    const int m = static_cast<int>(z.rows());
    const int n = static_cast<int>(z.cols());
    Matrix wx(m, r);
    Matrix wy(r, n);
    for (int i = 0; i < m; ++i) wx.row(i).setConstant(tau * static_cast<double>((z.row(i).array() > 0.0).count()));
    for (int j = 0; j < n; ++j) wy.col(j).setConstant(tau * static_cast<double>((z.col(j).array() > 0.0).count()));
    return detail::pack(wx, wy);
}

/// Reference F and its self-concordance constant for the instance's current weights.
inline std::pair<Oracle, double> nmf_reference(const NmfInstance& inst) {
    const Eigen::Index dim = inst.dim();
    const Oracle quartic = polynomial_reference(dim, 2);
    const double kq = polynomial_reference_kappa(2);
    if (inst.loss == NmfLoss::frobenius) {
        const Oracle unit = add(quartic, weighted_log_barrier(Vector::Ones(dim)));
        // Q is kq-SC and the unit barrier 1-SC, so their sum is 1-SC
        return {scale(unit, inst.barrier_weight), std::max(kq, 1.0) / std::sqrt(inst.barrier_weight)};
    }
    const Vector w = kl_barrier_weights(inst.z, inst.r, inst.barrier_weight);
    const Oracle barrier = weighted_log_barrier(w);
    const double kb = 1.0 / std::sqrt(std::max(w.minCoeff(), 1e-300));
    return {add(barrier, quartic, inst.quartic_weight), std::max(kb, kq / std::sqrt(inst.quartic_weight))};
}

inline Sampler nmf_sampler(const NmfInstance& inst) { return orthant_sampler(inst.dim(), 1e-2, 1e1); }

/// The (f, F, kappa = 1) pair of an instance whose weights have been fitted.
inline ReferencePair nmf_oracles(const NmfInstance& inst) {
    if (!(inst.barrier_weight > 0.0)) throw std::invalid_argument("nmf_oracles: barrier weight not set");
    if (inst.loss == NmfLoss::kl && !(inst.quartic_weight > 0.0))
        throw std::invalid_argument("nmf_oracles: quartic weight not set");
    ReferencePair pair;
    pair.objective = inst.loss == NmfLoss::frobenius ? nmf_mse_objective(inst.z, inst.r)
                                                     : nmf_kl_objective(inst.z, inst.r);
    auto [ref, kref] = nmf_reference(inst);
    pair.reference = ref;
    pair.kappa = 1.0;
    pair.kappa_ref = kref;
    pair.lower_bound_hint = 0.0;
    return pair;
}

struct NmfFitOptions {
    int sample_budget = 60;
    int n_dirs = 4;
    std::uint64_t seed = 0;
    double kl_tau = 4.0;
};

/// Fits the reference weights: ell for MSE on (Q + B); c_q for KL on the
/// bilinear remainder, then doubled until the full KL pair passes.
inline void fit_nmf_weights(NmfInstance& inst, const NmfFitOptions& opt = {}) {
    WeightFitOptions wf;
    wf.sample_budget = opt.sample_budget;
    wf.n_dirs = opt.n_dirs;
    wf.seed = opt.seed;
    wf.grid_start = 0x1.0p-10;
    const Sampler sampler = nmf_sampler(inst);
    const Eigen::Index dim = inst.dim();
    if (inst.loss == NmfLoss::frobenius) {
        const Oracle unit = add(polynomial_reference(dim, 2), weighted_log_barrier(Vector::Ones(dim)));
        const WeightFit fit = fit_reference_weight(nmf_mse_objective(inst.z, inst.r), unit, 1.0, sampler, wf);
        inst.barrier_weight = fit.weight;
        inst.quartic_weight = fit.weight;
    } else {
        inst.barrier_weight = opt.kl_tau;
        const WeightFit fit =
            fit_reference_weight(nmf_bilinear_part(inst.m, inst.n, inst.r), polynomial_reference(dim, 2), 1.0,
                                 sampler, wf);
        inst.quartic_weight = fit.weight;
        ScCheckOptions sc;
        sc.n_points = opt.sample_budget;
        sc.n_dirs = opt.n_dirs;
        sc.seed = derive_seed(opt.seed, 1);
        for (int attempt = 0;; ++attempt) {
            if (check_self_concordance(nmf_oracles(inst), sampler, sc).passed) break;
            if (attempt == 20) throw std::runtime_error("fit_nmf_weights: KL reference failed validation");
            inst.quartic_weight *= 2.0;
        }
    }
    inst.weights_fitted = true;
}

/// MSE data: M = X^ Y^ with U[0,1] factors; Z replaces the zero singular values
/// of M by U[0, 0.1 sigma_r] draws. The hint is (1/(2mn)) ||Z - X^ Y^||_F^2.
inline NmfInstance make_nmf_mse(int m, int n, int r, std::uint64_t seed, bool fit_weights = true) {
    if (r < 1 || r > std::min(m, n)) throw std::invalid_argument("make_nmf_mse: need 1 <= r <= min(m, n)");
    Rng rng(seed);
    NmfInstance inst;
    inst.m = m;
    inst.n = n;
    inst.r = r;
    inst.seed = seed;
    inst.loss = NmfLoss::frobenius;
    inst.x_hat = rng.uniform_matrix(m, r);
    inst.y_hat = rng.uniform_matrix(r, n);
    const Matrix mm = inst.x_hat * inst.y_hat;
    const Eigen::JacobiSVD<Matrix> svd(mm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector sv = svd.singularValues();
    const int k = std::min(m, n);
    const double sigma_r = sv[r - 1];
    for (int i = r; i < k; ++i) sv[i] = rng.uniform(0.0, 0.1 * sigma_r);
    Matrix s = Matrix::Zero(m, n);
    s.diagonal().head(k) = sv;
    inst.z = svd.matrixU() * s * svd.matrixV().transpose();
    inst.optimal_value_hint = 0.5 / (static_cast<double>(m) * n) * (inst.z - mm).squaredNorm();
    if (fit_weights) fit_nmf_weights(inst, {60, 4, derive_seed(seed, 7), 4.0});
    return inst;
}

/// KL data: Z = X^ Y^ + noise * Z^ with all entries U[0,1]; the hint is f2(X^, Y^).
inline NmfInstance make_nmf_kl(int m, int n, int r, double noise, std::uint64_t seed, bool fit_weights = true) {
    if (r < 1 || r > std::min(m, n)) throw std::invalid_argument("make_nmf_kl: need 1 <= r <= min(m, n)");
    if (!(noise >= 0.0)) throw std::invalid_argument("make_nmf_kl: noise must be >= 0");
    Rng rng(seed);
    NmfInstance inst;
    inst.m = m;
    inst.n = n;
    inst.r = r;
    inst.seed = seed;
    inst.noise = noise;
    inst.loss = NmfLoss::kl;
    inst.x_hat = rng.uniform_matrix(m, r);
    inst.y_hat = rng.uniform_matrix(r, n);
    const Matrix z_hat = rng.uniform_matrix(m, n);
    inst.z = inst.x_hat * inst.y_hat + noise * z_hat;
    inst.optimal_value_hint =
        nmf_kl_objective(inst.z, r).value(detail::pack(inst.x_hat, inst.y_hat)).value();
    if (fit_weights) fit_nmf_weights(inst, {60, 4, derive_seed(seed, 7), 4.0});
    return inst;
}

/// Initial point with X, Y entries i.i.d. U[0,1].
inline Vector nmf_initial_point(const NmfInstance& inst, std::uint64_t seed) {
    Rng rng(seed);
    const Matrix x = rng.uniform_matrix(inst.m, inst.r);
    const Matrix y = rng.uniform_matrix(inst.r, inst.n);
    return detail::pack(x, y);
}

}  // namespace sconcord::problems
