#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "types.hpp"

namespace sconcord {

/// Raised when the Hessian of f + F is not numerically positive definite, or the
/// regularized decrement would be the square root of a negative number.
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolveStatus { converged, max_iters, assumption_violation, domain_rejection };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters: return "max_iters";
        case SolveStatus::assumption_violation: return "assumption_violation";
        case SolveStatus::domain_rejection: return "domain_rejection";
    }
    return "unknown";
}

struct TraceRecord {
    int iter = 0;
    double f_value = 0.0;
    double nu = 0.0;
    double step_size = 0.0;
    std::optional<double> sigma;
    std::optional<double> ratio;  // -inf for infeasible trial points
    std::optional<bool> accepted;
    std::optional<double> lambda_min_est;
    // f(x_j) - m_j(t_j) on ARM iterations that reached the ratio test
    std::optional<double> model_decrease;
    CallCounts calls;
    std::int64_t wall_nanos = 0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::max_iters;
    Vector final_point;
    double final_nu = std::numeric_limits<double>::infinity();
    double best_f = std::numeric_limits<double>::infinity();
    double min_nu_so_far = std::numeric_limits<double>::infinity();
    std::vector<TraceRecord> trace;
    int iterations = 0;
    std::string message;

    /// Updates the running summaries; the record itself is kept only when asked.
    void push(const TraceRecord& rec, bool keep = true) {
        if (keep) trace.push_back(rec);
        iterations = rec.iter;
        best_f = std::min(best_f, rec.f_value);
        min_nu_so_far = std::min(min_nu_so_far, rec.nu);
    }
};

/// Monotonic stopwatch for trace timestamps; zeroed when deterministic output is requested.
class Stopwatch {
public:
    explicit Stopwatch(bool enabled = true) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}

    std::int64_t elapsed() const {
        if (!enabled_) return 0;
        return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace sconcord
