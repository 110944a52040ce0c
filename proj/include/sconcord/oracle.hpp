#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "types.hpp"

namespace sconcord {

/// Snapshot of how often each oracle query kind has been answered.
struct CallCounts {
    long value = 0;
    long gradient = 0;
    long hessian = 0;
    long hvp = 0;

    CallCounts operator-(const CallCounts& o) const {
        return {value - o.value, gradient - o.gradient, hessian - o.hessian, hvp - o.hvp};
    }
    CallCounts operator+(const CallCounts& o) const {
        return {value + o.value, gradient + o.gradient, hessian + o.hessian, hvp + o.hvp};
    }
};

/// A twice-differentiable objective on an open domain.
///
/// Problem authors supply value and gradient, plus a Hessian, an HVP, or both.
/// A missing Hessian is assembled column by column from HVPs; a missing HVP is
/// computed from the Hessian. Values outside the domain are reported as +inf and
/// the derivative callbacks are never invoked there.
///
/// Handles are cheap to copy and share their call counters. All queries are
/// const and the counters are atomic, so concurrent read-only use is safe as long
/// as the callbacks themselves are pure.
class Oracle {
public:
    struct Callbacks {
        std::function<double(const Vector&)> value;
        std::function<Vector(const Vector&)> gradient;
        std::function<Matrix(const Vector&)> hessian;
        std::function<Vector(const Vector&, const Vector&)> hvp;
        std::function<bool(const Vector&)> in_domain;
    };

    Oracle() = default;

    Oracle(Eigen::Index dim, Callbacks cb)
        : dim_(dim),
          cb_(std::make_shared<const Callbacks>(std::move(cb))),
          counters_(std::make_shared<Counters>()) {
        if (dim_ <= 0) throw std::invalid_argument("Oracle: dimension must be positive");
        if (!cb_->value || !cb_->gradient)
            throw std::invalid_argument("Oracle: value and gradient callbacks are required");
        if (!cb_->hessian && !cb_->hvp)
            throw std::invalid_argument("Oracle: a hessian or hvp callback is required");
    }

    bool valid() const { return static_cast<bool>(cb_); }
    Eigen::Index dim() const { return dim_; }
    bool has_hessian() const { return static_cast<bool>(cb_->hessian); }
    bool has_hvp() const { return static_cast<bool>(cb_->hvp); }

    bool in_domain(const Vector& x) const {
        check_dim(x);
        if (!x.allFinite()) return false;
        return !cb_->in_domain || cb_->in_domain(x);
    }

    ExtendedReal value(const Vector& x) const {
        ++counters_->value;
        if (!in_domain(x)) return ExtendedReal::infinity();
        const double v = cb_->value(x);
        if (!std::isfinite(v)) return ExtendedReal::infinity();
        return ExtendedReal(v);
    }

    Vector gradient(const Vector& x) const {
        require_domain(x, "gradient");
        ++counters_->gradient;
        return cb_->gradient(x);
    }

    Matrix hessian(const Vector& x) const {
        require_domain(x, "hessian");
        ++counters_->hessian;
        return raw_hessian(x);
    }

    Vector hvp(const Vector& x, const Vector& v) const {
        require_domain(x, "hvp");
        check_dim(v);
        ++counters_->hvp;
        if (cb_->hvp) return cb_->hvp(x, v);
        return cb_->hessian(x) * v;
    }

    /// Hessian quadratic form h' H(x) h.
    double curvature(const Vector& x, const Vector& h) const { return h.dot(hvp(x, h)); }

    CallCounts counts() const {
        return {counters_->value.load(), counters_->gradient.load(), counters_->hessian.load(),
                counters_->hvp.load()};
    }

    const Callbacks& callbacks() const { return *cb_; }

private:
    struct Counters {
        std::atomic<long> value{0};
        std::atomic<long> gradient{0};
        std::atomic<long> hessian{0};
        std::atomic<long> hvp{0};
    };

    void check_dim(const Vector& x) const {
        if (x.size() != dim_)
            throw std::invalid_argument("Oracle: expected dimension " + std::to_string(dim_) +
                                        ", got " + std::to_string(x.size()));
    }

    void require_domain(const Vector& x, const char* what) const {
        if (!in_domain(x))
            throw std::domain_error(std::string("Oracle::") + what + " queried outside the domain");
    }

    Matrix raw_hessian(const Vector& x) const {
        if (cb_->hessian) return cb_->hessian(x);
        Matrix h(dim_, dim_);
        Vector e = Vector::Zero(dim_);
        for (Eigen::Index j = 0; j < dim_; ++j) {
            e[j] = 1.0;
            h.col(j) = cb_->hvp(x, e);
            e[j] = 0.0;
        }
        return 0.5 * (h + h.transpose());
    }

    Eigen::Index dim_ = 0;
    std::shared_ptr<const Callbacks> cb_;
    std::shared_ptr<Counters> counters_;
};

/// a + weight * b on the intersection of the domains.
inline Oracle add(const Oracle& a, const Oracle& b, double weight = 1.0) {
    if (a.dim() != b.dim()) throw std::invalid_argument("add: dimension mismatch");
    Oracle::Callbacks cb;
    cb.in_domain = [a, b](const Vector& x) { return a.in_domain(x) && b.in_domain(x); };
    cb.value = [a, b, weight](const Vector& x) {
        return a.value(x).to_double() + weight * b.value(x).to_double();
    };
    cb.gradient = [a, b, weight](const Vector& x) -> Vector {
        return a.gradient(x) + weight * b.gradient(x);
    };
    cb.hvp = [a, b, weight](const Vector& x, const Vector& v) -> Vector {
        return a.hvp(x, v) + weight * b.hvp(x, v);
    };
    if (a.has_hessian() && b.has_hessian()) {
        cb.hessian = [a, b, weight](const Vector& x) -> Matrix {
            return a.hessian(x) + weight * b.hessian(x);
        };
    }
    return Oracle(a.dim(), std::move(cb));
}

/// c * a.
inline Oracle scale(const Oracle& a, double c) {
    Oracle::Callbacks cb;
    cb.in_domain = [a](const Vector& x) { return a.in_domain(x); };
    cb.value = [a, c](const Vector& x) { return c * a.value(x).to_double(); };
    cb.gradient = [a, c](const Vector& x) -> Vector { return c * a.gradient(x); };
    cb.hvp = [a, c](const Vector& x, const Vector& v) -> Vector { return c * a.hvp(x, v); };
    if (a.has_hessian()) cb.hessian = [a, c](const Vector& x) -> Matrix { return c * a.hessian(x); };
    return Oracle(a.dim(), std::move(cb));
}

/// x -> (mu / 2) ||x - center||^2 on all of R^n.
inline Oracle prox_quadratic(const Vector& center, double mu) {
    const Eigen::Index n = center.size();
    Oracle::Callbacks cb;
    cb.value = [center, mu](const Vector& x) { return 0.5 * mu * (x - center).squaredNorm(); };
    cb.gradient = [center, mu](const Vector& x) -> Vector { return mu * (x - center); };
    cb.hvp = [mu](const Vector&, const Vector& v) -> Vector { return mu * v; };
    cb.hessian = [n, mu](const Vector&) -> Matrix { return mu * Matrix::Identity(n, n); };
    return Oracle(n, std::move(cb));
}

/// The zero function on R^n, used as the reference of a self-concordant objective.
inline Oracle zero_function(Eigen::Index n) {
    Oracle::Callbacks cb;
    cb.value = [](const Vector&) { return 0.0; };
    cb.gradient = [n](const Vector&) -> Vector { return Vector::Zero(n); };
    cb.hvp = [n](const Vector&, const Vector&) -> Vector { return Vector::Zero(n); };
    cb.hessian = [n](const Vector&) -> Matrix { return Matrix::Zero(n, n); };
    return Oracle(n, std::move(cb));
}

/// An objective f together with a convex reference F such that f + F is
/// kappa-self-concordant. kappa_ref, when present, is the self-concordance
/// constant of F itself.
struct ReferencePair {
    Oracle objective;
    Oracle reference;
    double kappa = 1.0;
    std::optional<double> kappa_ref;
    std::optional<double> lower_bound_hint;

    Eigen::Index dim() const { return objective.dim(); }

    /// Oracle calls answered by f and F together.
    CallCounts counts() const { return objective.counts() + reference.counts(); }

    /// f + sigma * F.
    Oracle regularized(double sigma = 1.0) const { return add(objective, reference, sigma); }

    void validate() const {
        if (!objective.valid() || !reference.valid())
            throw std::invalid_argument("ReferencePair: missing oracle");
        if (objective.dim() != reference.dim())
            throw std::invalid_argument("ReferencePair: objective/reference dimension mismatch");
        if (!(kappa >= 0.0)) throw std::invalid_argument("ReferencePair: kappa must be >= 0");
        if (kappa_ref && !(*kappa_ref >= 0.0))
            throw std::invalid_argument("ReferencePair: kappa_ref must be >= 0");
    }
};

/// Scalars of the descent inequality along a direction d at x:
/// rho = -grad' d, delta = d' H_f d, delta_ref = d' H_F d (possibly sigma-scaled),
/// eta = rho / sqrt(delta + delta_ref), t_bar = the model-minimizing step.
struct StepQuantities {
    double rho = 0.0;
    double delta = 0.0;
    double delta_ref = 0.0;
    std::optional<double> eta;
    std::optional<double> t_bar;

    double curvature() const { return delta + delta_ref; }

    static StepQuantities from(double rho, double delta, double delta_ref, double kappa) {
        StepQuantities q;
        q.rho = rho;
        q.delta = delta;
        q.delta_ref = delta_ref;
        const double curv = delta + delta_ref;
        if (curv > 0.0) {
            q.eta = rho / std::sqrt(curv);
            if (rho >= 0.0) q.t_bar = rho / (curv + kappa * rho * std::sqrt(curv));
        }
        return q;
    }
};

/// Evaluates StepQuantities for direction d at x under the pair (f, sigma F).
inline StepQuantities step_quantities(const ReferencePair& pair, const Vector& x, const Vector& d,
                                      double sigma = 1.0) {
    const double rho = -pair.objective.gradient(x).dot(d);
    const double delta = pair.objective.curvature(x, d);
    const double delta_ref = sigma * pair.reference.curvature(x, d);
    return StepQuantities::from(rho, delta, delta_ref, pair.kappa);
}

}  // namespace sconcord
