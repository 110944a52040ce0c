#pragma once

// Runs one method on one problem bundle and collects everything the CLI
// reports: terminal status, gap, oracle counts, HVPs, trace rows, config echo.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "arm.hpp"
#include "io/trace_csv.hpp"
#include "io/version.hpp"
#include "ippm.hpp"
#include "newton_cg.hpp"
#include "problems/registry.hpp"
#include "rnm.hpp"

namespace sconcord {

struct RunOptions {
    problems::MethodKind method = problems::MethodKind::arm_newton;
    ArmConfig arm;
    RnmConfig rnm;
    // newton_cg
    double ncg_eps0 = 1e-3;
    double ncg_eps1 = 1e-8;
    std::optional<double> ncg_beta;  // default: 2 sqrt(cond) of the Hessian at x0
    double fail_prob = 0.01;
    // ippm
    double ippm_mu_factor = 2.0;
    double ippm_eps = 1e-3;
    std::optional<double> ippm_gap_budget;
    std::optional<double> ippm_beta;
    bool deterministic = false;
    std::uint64_t seed = 0;

    RunOptions() {
        arm.eps = 1e-6;
        arm.eps_g = 1e-6;
        arm.max_iters = 500;
    }
};

struct RunResult {
    std::string problem;
    std::string method;
    std::uint64_t seed = 0;
    std::string status;
    double final_f = 0.0;
    std::optional<double> gap;
    double best_f = 0.0;
    double final_nu = 0.0;
    long iterations = 0;
    CallCounts calls;
    long hvp_count = 0;
    std::int64_t wall_nanos = 0;
    std::string message;
    Vector final_point;
    std::vector<io::TraceRow> trace;
    nlohmann::json config;
    nlohmann::json extra = nlohmann::json::object();
};

namespace detail {

inline double exact_sqrt_cond(const Matrix& h) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > 0.0)) throw std::domain_error("Hessian at the start point is not positive definite");
    return std::sqrt(es.eigenvalues().maxCoeff() / lo);
}

inline const char* to_string(SigmaPolicy p) {
    return p == SigmaPolicy::endpoint_aggressive ? "endpoint_aggressive" : "endpoint_conservative";
}

inline nlohmann::json arm_json(const ArmConfig& c) {
    return {{"sigma0", c.sigma0}, {"sigma_min", c.sigma_min}, {"eta1", c.eta1},     {"eta2", c.eta2},
            {"gamma1", c.gamma1}, {"gamma2", c.gamma2},       {"gamma3", c.gamma3}, {"eps", c.eps},
            {"eps_g", c.eps_g},   {"eps_h", c.eps_h},         {"option", to_string(c.option)},
            {"max_iters", c.max_iters}, {"sigma_update_policy", to_string(c.sigma_update_policy)}};
}

}  // namespace detail

inline RunResult run_method(const problems::ProblemBundle& b, const RunOptions& opt) {
    using problems::MethodKind;
    if (!problems::compatible(opt.method, b.kind))
        throw std::invalid_argument(std::string("method ") + problems::to_string(opt.method) +
                                    " is not applicable to problem " + problems::to_string(b.kind));
    RunResult res;
    res.problem = problems::to_string(b.kind);
    res.method = problems::to_string(opt.method);
    res.seed = opt.seed;
    res.config = {{"deterministic", opt.deterministic}, {"artifact_version", artifact_version}};
    const Oracle& f = b.pair.objective;
    const CallCounts before = b.pair.counts();
    Stopwatch clock(!opt.deterministic);

    auto finish_report = [&](const SolveReport& rep) {
        res.status = to_string(rep.status);
        res.final_point = rep.final_point;
        res.final_nu = rep.final_nu;
        res.iterations = rep.iterations;
        res.message = rep.message;
        for (const TraceRecord& r : rep.trace) res.trace.push_back(io::to_row(r));
    };

    switch (opt.method) {
        case MethodKind::rnm: {
            RnmConfig c = opt.rnm;
            c.timing = !opt.deterministic;
            res.config["rnm"] = {{"max_iters", c.max_iters}, {"tol_nu", c.tol_nu}};
            finish_report(rnm_solve(b.pair, b.x0, c));
            break;
        }
        case MethodKind::arm_newton:
        case MethodKind::arm_negcurv:
        case MethodKind::arm_precond_gd: {
            ArmConfig c = opt.arm;
            c.option = opt.method == MethodKind::arm_newton    ? ArmOption::newton
                       : opt.method == MethodKind::arm_negcurv ? ArmOption::negcurv
                                                               : ArmOption::precond_gd;
            c.seed = opt.seed;
            c.timing = !opt.deterministic;
            res.config["arm"] = detail::arm_json(c);
            finish_report(arm_solve(b.pair, b.x0, c));
            break;
        }
        case MethodKind::newton_cg: {
            NewtonCgConfig c;
            c.kappa = b.pair.kappa;
            c.eps0 = opt.ncg_eps0;
            c.eps1 = opt.ncg_eps1;
            c.beta = opt.ncg_beta ? *opt.ncg_beta : std::max(2.0 * detail::exact_sqrt_cond(f.hessian(b.x0)), 1.5);
            c.fail_prob = opt.fail_prob;
            c.seed = opt.seed;
            const double f0 = f.value(b.x0).value();
            c.gap_budget = b.pair.lower_bound_hint ? std::max(f0 - *b.pair.lower_bound_hint, 0.0) : 1.0;
            c.hvp_only = true;
            res.config["newton_cg"] = {{"kappa", c.kappa}, {"eps0", c.eps0}, {"eps1", c.eps1}, {"beta", c.beta},
                                       {"fail_prob", c.fail_prob}, {"gap_budget", c.gap_budget}};
            const NewtonCgResult r = newton_cg_solve(f, b.x0, c);
            res.status = to_string(r.certificate);
            res.final_point = r.y;
            res.final_nu = lambda_f(f, r.y);
            res.iterations = static_cast<long>(r.trace.size()) - 1;
            res.hvp_count = r.hvp_count;
            res.message = r.message;
            for (const NewtonCgIteration& it : r.trace) {
                io::TraceRow row;
                row.iter = it.k;
                row.f = it.f_value;
                row.nu = std::sqrt(std::max(it.rho, 0.0));
                row.step = it.step;
                res.trace.push_back(row);
            }
            res.extra["k_star_reached"] = r.state.k_star_reached;
            break;
        }
        case MethodKind::ippm: {
            if (!b.weak_sc_ell) throw std::invalid_argument("ippm needs a weakly self-concordant problem");
            IppmConfig c;
            c.kappa = b.pair.kappa;
            c.ell = *b.weak_sc_ell;
            c.mu = opt.ippm_mu_factor * c.ell;
            c.eps = opt.ippm_eps;
            c.fail_prob = opt.fail_prob;
            c.seed = opt.seed;
            const double f0 = f.value(b.x0).value();
            if (opt.ippm_gap_budget) {
                c.gap_budget = *opt.ippm_gap_budget;
            } else if (b.pair.lower_bound_hint) {
                c.gap_budget = std::max(f0 - *b.pair.lower_bound_hint, 1e-12);
            } else {
                // brief ARM pre-pass; doubled because its best value only estimates inf f
                ArmConfig pre = opt.arm;
                pre.max_iters = 200;
                pre.timing = false;
                const SolveReport pr = arm_solve(b.pair, b.x0, pre);
                c.gap_budget = std::max(2.0 * (f0 - pr.best_f), 1e-12);
            }
            const Matrix h0 = f.hessian(b.x0) + c.mu * Matrix::Identity(f.dim(), f.dim());
            c.beta = opt.ippm_beta ? *opt.ippm_beta : std::max(2.0 * detail::exact_sqrt_cond(h0), 1.5);
            res.config["ippm"] = {{"kappa", c.kappa}, {"ell", c.ell},       {"mu", c.mu},
                                  {"eps", c.eps},     {"beta", c.beta},     {"fail_prob", c.fail_prob},
                                  {"gap_budget", c.gap_budget}};
            const IppmResult r = ippm_solve(f, b.x0, c);
            res.status = r.converged ? "converged" : "max_iters";
            res.final_point = r.z;
            ReferencePair prox{f, prox_quadratic(Vector::Zero(f.dim()), c.mu), c.kappa, 0.0, std::nullopt};
            res.final_nu = regularized_newton_direction(prox, r.z, f.gradient(r.z), 1.0).second;
            res.iterations = r.outer_iterations;
            res.hvp_count = r.hvp_count;
            res.message = r.message;
            for (const IppmOuter& o : r.outer_trace) {
                io::TraceRow row;
                row.iter = o.j;
                row.f = o.f_value;
                res.trace.push_back(row);
            }
            res.extra["outer_iterations"] = r.outer_iterations;
            res.extra["outer_bound"] = std::floor(c.k_bound()) + 2.0;
            break;
        }
    }

    res.wall_nanos = clock.elapsed();
    res.calls = b.pair.counts() - before;
    if (opt.method != MethodKind::newton_cg && opt.method != MethodKind::ippm) res.hvp_count = res.calls.hvp;
    res.final_f = f.value(res.final_point).value();
    res.best_f = res.final_f;
    for (const io::TraceRow& r : res.trace) res.best_f = std::min(res.best_f, r.f);
    if (b.optimal_value_hint) res.gap = res.final_f - *b.optimal_value_hint;
    if (opt.deterministic)
        for (io::TraceRow& r : res.trace) r.wall_nanos = 0;
    return res;
}

inline nlohmann::json report_json(const RunResult& r) {
    nlohmann::json j;
    j["artifact_version"] = artifact_version;
    j["problem"] = r.problem;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["status"] = r.status;
    j["final_f"] = r.final_f;
    j["optimality_gap"] = r.gap ? nlohmann::json(*r.gap) : nlohmann::json(nullptr);
    j["best_f"] = r.best_f;
    j["final_nu"] = std::isfinite(r.final_nu) ? nlohmann::json(r.final_nu) : nlohmann::json(nullptr);
    j["iterations"] = r.iterations;
    j["oracle_calls"] = {{"value", r.calls.value},
                         {"gradient", r.calls.gradient},
                         {"hessian", r.calls.hessian},
                         {"hvp", r.calls.hvp}};
    j["hvp_count"] = r.hvp_count;
    j["wall_nanos"] = r.wall_nanos;
    j["message"] = r.message;
    j["config"] = r.config;
    j["extra"] = r.extra;
    return j;
}

}  // namespace sconcord
