#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sconcord {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A value in R ∪ {+∞}. Infinity is an explicit tag, never a sentinel float.
class ExtendedReal {
public:
    explicit ExtendedReal(double v) : value_(v), finite_(true) {
        if (!std::isfinite(v)) {
            throw std::domain_error("ExtendedReal: finite constructor given " + std::to_string(v));
        }
    }

    static ExtendedReal infinity() { return ExtendedReal(); }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }

    double value() const {
        if (!finite_) throw std::domain_error("ExtendedReal: value() of +inf");
        return value_;
    }

    /// IEEE view for arithmetic in comparisons and ratios.
    double to_double() const { return finite_ ? value_ : std::numeric_limits<double>::infinity(); }

    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return !(b < a); }
    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }

private:
    ExtendedReal() : value_(0.0), finite_(false) {}
    double value_;
    bool finite_;
};

inline ExtendedReal operator+(const ExtendedReal& a, double b) {
    return a.is_finite() ? ExtendedReal(a.value() + b) : a;
}

/// Seeded generator with portable transforms: identical seed gives bitwise-identical
/// draws on every standard library, unlike std::*_distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    Vector normal_vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Vector unit_vector(Eigen::Index n) {
        Vector v = normal_vector(n);
        double norm = v.norm();
        while (norm == 0.0) {
            v = normal_vector(n);
            norm = v.norm();
        }
        return v / norm;
    }

    Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo = 0.0, double hi = 1.0) {
        Matrix m(rows, cols);
        // column-major fill order is part of the determinism contract
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(lo, hi);
        return m;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Derives an independent stream seed from a base seed and a salt (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace sconcord
