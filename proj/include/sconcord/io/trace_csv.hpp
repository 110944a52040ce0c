#pragma once

// Solver traces as CSV. The first line carries the schema version and an
// FNV-1a fingerprint of the column list so readers can reject stale files.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "../report.hpp"

namespace sconcord::io {

inline constexpr std::array<const char*, 12> trace_columns{"iter",       "f",          "nu",        "sigma",
                                                           "ratio",      "accepted",   "lambda_min_est", "step",
                                                           "grad_calls", "hess_calls", "hvp_calls", "wall_nanos"};
inline constexpr int trace_schema_version = 1;

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string trace_header() {
    std::string h;
    for (std::size_t i = 0; i < trace_columns.size(); ++i) {
        if (i) h += ',';
        h += trace_columns[i];
    }
    return h;
}

inline std::string trace_fingerprint_line() {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# sconcord-trace schema=%d fnv1a64=%016llx", trace_schema_version,
                  static_cast<unsigned long long>(fnv1a64(trace_header())));
    return buf;
}

/// One CSV row; absent fields are written empty.
struct TraceRow {
    long iter = 0;
    double f = 0.0;
    std::optional<double> nu;
    std::optional<double> sigma;
    std::optional<double> ratio;
    std::optional<bool> accepted;
    std::optional<double> lambda_min_est;
    std::optional<double> step;
    long grad_calls = 0;
    long hess_calls = 0;
    long hvp_calls = 0;
    std::int64_t wall_nanos = 0;
};

inline TraceRow to_row(const TraceRecord& r) {
    TraceRow row;
    row.iter = r.iter;
    row.f = r.f_value;
    if (std::isfinite(r.nu)) row.nu = r.nu;
    row.sigma = r.sigma;
    row.ratio = r.ratio;
    row.accepted = r.accepted;
    row.lambda_min_est = r.lambda_min_est;
    row.step = r.step_size;
    row.grad_calls = r.calls.gradient;
    row.hess_calls = r.calls.hessian;
    row.hvp_calls = r.calls.hvp;
    row.wall_nanos = r.wall_nanos;
    return row;
}

namespace detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace detail

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
    os << trace_fingerprint_line() << "\n" << trace_header() << "\n";
    for (const TraceRow& r : rows) {
        os << r.iter << ',' << detail::fmt(r.f) << ',' << detail::fmt(r.nu) << ',' << detail::fmt(r.sigma) << ','
           << detail::fmt(r.ratio) << ',' << (r.accepted ? (*r.accepted ? "1" : "0") : "") << ','
           << detail::fmt(r.lambda_min_est) << ',' << detail::fmt(r.step) << ',' << r.grad_calls << ','
           << r.hess_calls << ',' << r.hvp_calls << ',' << r.wall_nanos << "\n";
    }
}

}  // namespace sconcord::io
