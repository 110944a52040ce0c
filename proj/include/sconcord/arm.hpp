#pragma once

// Adaptive regularization method with general / preconditioned-gradient /
// regularized-Newton / negative-curvature direction rules.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "numerics.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "rnm.hpp"
#include "scalar.hpp"

namespace sconcord {

enum class ArmOption { general, precond_gd, newton, negcurv };
enum class SigmaPolicy { endpoint_aggressive, endpoint_conservative };

inline const char* to_string(ArmOption o) {
    switch (o) {
        case ArmOption::general: return "general";
        case ArmOption::precond_gd: return "precond_gd";
        case ArmOption::newton: return "newton";
        case ArmOption::negcurv: return "negcurv";
    }
    return "unknown";
}

struct ArmConfig {
    double sigma0 = 1.0;
    double sigma_min = 0x1.0p-30;
    double eta1 = 0.01;
    double eta2 = 0.9;
    double gamma1 = 0.5;
    double gamma2 = 2.0;
    double gamma3 = 2.0;
    // override the pair's constants when set
    std::optional<double> kappa;
    std::optional<double> kappa_ref;
    double eps = 1e-6;
    double eps_g = 1e-6;
    double eps_h = 1e-4;
    ArmOption option = ArmOption::newton;
    int max_iters = 1000;
    SigmaPolicy sigma_update_policy = SigmaPolicy::endpoint_aggressive;
    double lanczos_rel_tol = 1e-2;
    double lanczos_fail_prob = 1e-6;
    std::uint64_t seed = 0;
    bool record_trace = true;
    bool timing = true;

    void validate() const {
        if (!(sigma_min > 0.0 && sigma_min <= sigma0)) throw std::invalid_argument("ArmConfig: need 0 < sigma_min <= sigma0");
        if (!(eta1 > 0.0 && eta1 <= eta2 && eta2 < 1.0)) throw std::invalid_argument("ArmConfig: need 0 < eta1 <= eta2 < 1");
        if (!(gamma1 > 0.0 && gamma1 < 1.0)) throw std::invalid_argument("ArmConfig: need 0 < gamma1 < 1");
        if (!(gamma2 > 1.0 && gamma2 <= gamma3)) throw std::invalid_argument("ArmConfig: need 1 < gamma2 <= gamma3");
        if (max_iters < 1) throw std::invalid_argument("ArmConfig: max_iters must be >= 1");
    }
};

/// External direction rule for the general and precond_gd options. For
/// precond_gd only `preconditioner` is consulted (identity when absent).
struct DirectionProvider {
    std::function<Vector(const Vector& x, const Vector& grad, double sigma)> direction;
    std::function<Matrix(const Vector& x)> preconditioner;
    // declared threshold above which `direction` is a descent direction; reporting only
    std::optional<double> sigma_bar;
};

enum class DirectionKind { newton_like, neg_curvature, preconditioned };

struct DirectionOutcome {
    Vector d;
    StepQuantities quantities;  // delta_ref already scaled by sigma
    DirectionKind kind = DirectionKind::newton_like;
    std::optional<EigenEstimate> lambda_min_est;
    bool solve_failed = false;
    bool lanczos_fallback = false;
    double nu = std::numeric_limits<double>::infinity();
    double lambda_nc = 0.0;
};

/// m(t) = f - rho t + kappa^{-2} omega_star(kappa t sqrt(curv)) for curv >= 0;
/// 0 at t = 0 when curv < 0; +inf otherwise.
inline ExtendedReal model_value(double rho, double curv, double kappa, double t, double f_x) {
    if (!(t >= 0.0)) throw std::domain_error("model_value: t must be >= 0");
    if (curv >= 0.0) {
        const ExtendedReal w = scaled_omega_star(kappa, t * std::sqrt(curv));
        if (w.is_infinite()) return w;
        return ExtendedReal(f_x - rho * t + w.value());
    }
    if (t == 0.0) return ExtendedReal(0.0);
    return ExtendedReal::infinity();
}

/// t = rho / (curv + kappa rho sqrt(curv)); +inf flags an unbounded model.
inline double step_first_option(double rho, double curv, double kappa) {
    if (!(rho >= 0.0)) throw std::domain_error("step_first_option: rho must be >= 0");
    if (!(curv >= 0.0)) throw std::domain_error("step_first_option: curv must be >= 0");
    if (rho == 0.0) return 0.0;
    if (curv == 0.0) return std::numeric_limits<double>::infinity();
    return rho / (curv + kappa * rho * std::sqrt(curv));
}

/// Step along a negative-curvature direction minimizing
/// f - kappa_F^{-2} omega(kappa_F t sqrt(sD)) + kappa^{-2} omega_star(kappa t sqrt(delta + sD)).
inline double step_negcurv(double delta, double sig_delta_ref, double kappa, double kappa_ref) {
    if (!(delta < 0.0)) throw std::domain_error("step_negcurv: delta must be negative");
    const double total = delta + sig_delta_ref;
    if (!(total > 0.0)) throw std::domain_error("step_negcurv: delta + sigma Delta must be positive");
    const double a = std::sqrt(sig_delta_ref);
    const double b = std::sqrt(total);
    const double denom = a * b * (kappa_ref * b + kappa * a);
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return -delta / denom;
}

/// Value of the curvature-branch model at t.
inline ExtendedReal negcurv_model_value(double delta, double sig_delta_ref, double kappa, double kappa_ref,
                                        double t, double f_x) {
    const double total = delta + sig_delta_ref;
    if (total < 0.0) return ExtendedReal::infinity();
    const ExtendedReal up = scaled_omega_star(kappa, t * std::sqrt(total));
    if (up.is_infinite()) return up;
    return ExtendedReal(f_x - scaled_omega(kappa_ref, t * std::sqrt(sig_delta_ref)) + up.value());
}

/// d = -(H_f + sigma H_F)^{-1} grad; a non-positive-definite system yields an
/// outcome with solve_failed set so the caller rejects and raises sigma.
inline DirectionOutcome direction_newton(const ReferencePair& pair, const Vector& x, double sigma) {
    const Vector grad = pair.objective.gradient(x);
    DirectionOutcome out;
    out.kind = DirectionKind::newton_like;
    try {
        auto [d, nu] = regularized_newton_direction(pair, x, grad, sigma);
        out.nu = nu;
        const double delta = pair.objective.curvature(x, d);
        out.quantities = StepQuantities::from(nu * nu, delta, nu * nu - delta, pair.kappa);
        out.d = std::move(d);
    } catch (const AssumptionViolation&) {
        out.solve_failed = true;
        out.d = Vector::Zero(x.size());
    }
    return out;
}

struct NegcurvSettings {
    double rel_tol = 1e-2;
    double fail_prob = 1e-6;
    std::uint64_t seed = 0;
};

/// Estimates (lambda_min, v) of the Hessian of f by Lanczos and applies the
/// three-branch rule with lambda_nc = sigma sqrt(eps_h) D^2F[v, v].
inline DirectionOutcome direction_negcurv(const ReferencePair& pair, const Vector& x, double sigma, double eps_h,
                                          const NegcurvSettings& eig = {}) {
    if (!pair.kappa_ref) throw std::invalid_argument("direction_negcurv: kappa_ref is required");
    const Matrix hf = pair.objective.hessian(x);
    const EigenEstimate est =
        min_eigenpair(LinearOperator::from_matrix(hf), eig.rel_tol, eig.fail_prob, eig.seed);

    DirectionOutcome newton = direction_newton(pair, x, sigma);
    if (!est.converged) {
        newton.lanczos_fallback = true;
        return newton;
    }
    const double vfv = pair.reference.curvature(x, est.vector);
    const double lambda_nc = sigma * std::sqrt(eps_h) * vfv;
    newton.lambda_min_est = est;
    newton.lambda_nc = lambda_nc;
    if (est.value >= -lambda_nc) return newton;

    DirectionOutcome out;
    out.kind = DirectionKind::neg_curvature;
    out.lambda_min_est = est;
    out.lambda_nc = lambda_nc;
    out.nu = newton.nu;
    const Vector grad = pair.objective.gradient(x);
    out.d = grad.dot(est.vector) <= 0.0 ? Vector(est.vector) : Vector(-est.vector);
    const double rho = -grad.dot(out.d);
    out.quantities = StepQuantities::from(rho, est.value, sigma * vfv, pair.kappa);
    return out;
}

namespace detail {

inline double next_sigma(const ArmConfig& c, double sigma, double r) {
    const bool aggressive = c.sigma_update_policy == SigmaPolicy::endpoint_aggressive;
    if (r >= c.eta2) return aggressive ? std::max(c.sigma_min, c.gamma1 * sigma) : sigma;
    if (r > c.eta1) return aggressive ? sigma : c.gamma2 * sigma;
    return aggressive ? c.gamma2 * sigma : c.gamma3 * sigma;
}

}  // namespace detail

inline SolveReport arm_solve(const ReferencePair& pair_in, const Vector& x0, const ArmConfig& cfg,
                             const DirectionProvider& provider = {}) {
    cfg.validate();
    ReferencePair pair = pair_in;
    if (cfg.kappa) pair.kappa = *cfg.kappa;
    if (cfg.kappa_ref) pair.kappa_ref = *cfg.kappa_ref;
    pair.validate();
    if (cfg.option == ArmOption::negcurv && !pair.kappa_ref)
        throw std::invalid_argument("arm_solve: option negcurv requires kappa_ref");
    if (cfg.option == ArmOption::general && !provider.direction)
        throw std::invalid_argument("arm_solve: option general requires a direction provider");
    if (!pair.objective.in_domain(x0)) throw std::domain_error("arm_solve: x0 outside the domain");

    const double kappa = pair.kappa;
    Stopwatch clock(cfg.timing);
    SolveReport rep;
    Vector x = x0;
    double fx = pair.objective.value(x).value();
    double sigma = cfg.sigma0;

    for (int j = 0;; ++j) {
        TraceRecord rec;
        rec.iter = j;
        rec.f_value = fx;
        rec.sigma = sigma;

        DirectionOutcome dir;
        bool terminate = false;
        switch (cfg.option) {
            case ArmOption::newton: {
                dir = direction_newton(pair, x, sigma);
                terminate = !dir.solve_failed && dir.nu <= cfg.eps;
                break;
            }
            case ArmOption::negcurv: {
                NegcurvSettings eig{cfg.lanczos_rel_tol, cfg.lanczos_fail_prob, derive_seed(cfg.seed, j)};
                dir = direction_negcurv(pair, x, sigma, cfg.eps_h, eig);
                terminate = dir.kind == DirectionKind::newton_like && !dir.solve_failed && !dir.lanczos_fallback &&
                            dir.nu <= cfg.eps_g;
                break;
            }
            case ArmOption::precond_gd: {
                const Vector grad = pair.objective.gradient(x);
                const Matrix h = provider.preconditioner ? provider.preconditioner(x)
                                                         : Matrix(Matrix::Identity(x.size(), x.size()));
                dir.kind = DirectionKind::preconditioned;
                dir.d = -(h * grad);
                dir.quantities = step_quantities(pair, x, dir.d, sigma);
                dir.nu = std::sqrt(std::max(grad.dot(h * grad), 0.0));
                terminate = dir.nu <= cfg.eps;
                break;
            }
            case ArmOption::general: {
                const Vector grad = pair.objective.gradient(x);
                dir.kind = DirectionKind::newton_like;
                dir.d = provider.direction(x, grad, sigma);
                dir.quantities = step_quantities(pair, x, dir.d, sigma);
                // the stationarity measure is -grad' d / sqrt(D^2(f + sigma F)[d, d])
                const double curv = dir.quantities.curvature();
                dir.nu = curv > 0.0 ? std::max(dir.quantities.rho, 0.0) / std::sqrt(curv)
                                    : std::numeric_limits<double>::infinity();
                terminate = curv > 0.0 && dir.quantities.rho / std::sqrt(curv) <= cfg.eps;
                break;
            }
        }
        rec.nu = dir.nu;
        if (dir.lambda_min_est) rec.lambda_min_est = dir.lambda_min_est->value;
        rep.final_nu = dir.nu;

        if (terminate) {
            rec.calls = pair.counts();
            rec.wall_nanos = clock.elapsed();
            rep.push(rec, cfg.record_trace);
            rep.status = SolveStatus::converged;
            break;
        }
        if (j == cfg.max_iters) {
            rec.calls = pair.counts();
            rec.wall_nanos = clock.elapsed();
            rep.push(rec, cfg.record_trace);
            rep.status = SolveStatus::max_iters;
            break;
        }

        // step size and model decrease; a nullopt ratio below means "reject, raise sigma"
        const StepQuantities& q = dir.quantities;
        double t = 0.0;
        std::optional<double> model_dec;
        double r = -std::numeric_limits<double>::infinity();
        bool stall = false;
        if (dir.solve_failed) {
            // indefinite regularized system at this sigma
        } else if (dir.kind == DirectionKind::neg_curvature) {
            const double total = q.delta + q.delta_ref;
            if (total > 0.0) {
                t = step_negcurv(q.delta, q.delta_ref, kappa, *pair.kappa_ref);
                if (std::isfinite(t)) {
                    const ExtendedReal m =
                        negcurv_model_value(q.delta, q.delta_ref, kappa, *pair.kappa_ref, t, fx);
                    if (m.is_finite()) model_dec = fx - m.value();
                }
            }
        } else if (cfg.option != ArmOption::newton && cfg.option != ArmOption::negcurv && q.rho < 0.0) {
            // grad' d > 0: t = 0, no progress possible at this sigma
            r = 0.0;
        } else {
            const bool newton_model = cfg.option == ArmOption::newton || cfg.option == ArmOption::negcurv;
            const double rho = newton_model ? dir.nu * dir.nu : q.rho;
            const double curv = newton_model ? dir.nu * dir.nu : q.curvature();
            if (curv >= 0.0) {
                t = newton_model ? 1.0 / (1.0 + kappa * dir.nu) : step_first_option(rho, curv, kappa);
                if (std::isfinite(t)) {
                    const ExtendedReal m = model_value(rho, curv, kappa, t, fx);
                    if (m.is_finite()) model_dec = fx - m.value();
                }
            }
        }

        std::optional<Vector> trial;
        std::optional<double> f_trial;
        if (model_dec) {
            if (std::abs(*model_dec) <= 1e-15 * (1.0 + std::abs(fx))) {
                stall = true;
            } else {
                trial = x + t * dir.d;
                const ExtendedReal ft = pair.objective.value(*trial);
                if (ft.is_finite()) {
                    f_trial = ft.value();
                    r = (fx - *f_trial) / *model_dec;
                }
            }
        }
        rec.model_decrease = model_dec;
        if (stall) {
            rec.calls = pair.counts();
            rec.wall_nanos = clock.elapsed();
            rep.push(rec, cfg.record_trace);
            rep.status = SolveStatus::converged;
            rep.message = "stall: model decrease below roundoff at iteration " + std::to_string(j);
            break;
        }

        const bool accept = f_trial.has_value() && r >= cfg.eta1;
        rec.ratio = r;
        rec.accepted = accept;
        rec.step_size = accept ? t : 0.0;
        rec.calls = pair.counts();
        rec.wall_nanos = clock.elapsed();
        rep.push(rec, cfg.record_trace);

        if (accept) {
            x = *trial;
            fx = *f_trial;
        }
        sigma = detail::next_sigma(cfg, sigma, r);
    }
    rep.final_point = x;
    return rep;
}

}  // namespace sconcord
