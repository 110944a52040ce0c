// sconcord: generate problems, run solvers, verify invariants, benchmark grids.
//
// Exit codes: 0 success, 1 suite or run failure, 2 usage error.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sconcord/harness.hpp"
#include "sconcord/io/instance_io.hpp"
#include "sconcord/suites.hpp"

namespace fs = std::filesystem;
using namespace sconcord;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_generator_flags(CLI::App* app, problems::GeneratorConfig& g) {
    app->add_option("--m", g.m, "NMF rows")->capture_default_str();
    app->add_option("--n", g.n, "NMF columns")->capture_default_str();
    app->add_option("--r", g.r, "NMF rank")->capture_default_str();
    app->add_option("--noise", g.noise, "NMF-KL noise level")->capture_default_str();
    app->add_option("--pr-n", g.pr_n, "phase retrieval signal length")->capture_default_str();
    app->add_option("--pr-m", g.pr_m, "phase retrieval measurements")->capture_default_str();
    app->add_option("--dim", g.barrier_dim, "log-barrier demo dimension")->capture_default_str();
    app->add_option("--fit-samples", g.fit_samples, "sample budget for reference-weight fits")->capture_default_str();
}

template <typename T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_config(const json& j, RunOptions& o, problems::GeneratorConfig& g) {
    if (j.contains("arm")) {
        const json& a = j["arm"];
        take(a, "sigma0", o.arm.sigma0);
        take(a, "sigma_min", o.arm.sigma_min);
        take(a, "eta1", o.arm.eta1);
        take(a, "eta2", o.arm.eta2);
        take(a, "gamma1", o.arm.gamma1);
        take(a, "gamma2", o.arm.gamma2);
        take(a, "gamma3", o.arm.gamma3);
        take(a, "eps", o.arm.eps);
        take(a, "eps_g", o.arm.eps_g);
        take(a, "eps_h", o.arm.eps_h);
        take(a, "max_iters", o.arm.max_iters);
        if (a.contains("kappa")) o.arm.kappa = a["kappa"].get<double>();
        if (a.contains("sigma_update_policy")) {
            const std::string p = a["sigma_update_policy"];
            if (p == "endpoint_aggressive") o.arm.sigma_update_policy = SigmaPolicy::endpoint_aggressive;
            else if (p == "endpoint_conservative") o.arm.sigma_update_policy = SigmaPolicy::endpoint_conservative;
            else throw UsageError("unknown sigma_update_policy '" + p + "'");
        }
    }
    if (j.contains("rnm")) {
        take(j["rnm"], "max_iters", o.rnm.max_iters);
        take(j["rnm"], "tol_nu", o.rnm.tol_nu);
    }
    if (j.contains("newton_cg")) {
        const json& n = j["newton_cg"];
        take(n, "eps0", o.ncg_eps0);
        take(n, "eps1", o.ncg_eps1);
        take(n, "fail_prob", o.fail_prob);
        if (n.contains("beta")) o.ncg_beta = n["beta"].get<double>();
    }
    if (j.contains("ippm")) {
        const json& p = j["ippm"];
        take(p, "mu_factor", o.ippm_mu_factor);
        take(p, "eps", o.ippm_eps);
        take(p, "fail_prob", o.fail_prob);
        if (p.contains("gap_budget")) o.ippm_gap_budget = p["gap_budget"].get<double>();
        if (p.contains("beta")) o.ippm_beta = p["beta"].get<double>();
    }
    if (j.contains("generator")) {
        const json& q = j["generator"];
        take(q, "m", g.m);
        take(q, "n", g.n);
        take(q, "r", g.r);
        take(q, "noise", g.noise);
        take(q, "pr_n", g.pr_n);
        take(q, "pr_m", g.pr_m);
        take(q, "barrier_dim", g.barrier_dim);
        take(q, "fit_samples", g.fit_samples);
    }
}

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open config '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << text;
}

std::string trace_text(const RunResult& r) {
    std::ostringstream os;
    io::write_trace_csv(os, r.trace);
    return os.str();
}

int worker_count(bool deterministic) {
    if (deterministic) return 1;
    if (const char* env = std::getenv("SCONCORD_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid SCONCORD_THREADS='" << env << "'\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// An externally produced trace with columns iter,f,wall_nanos.
struct ExternalTrace {
    std::string label;
    std::vector<std::tuple<long, double, long long>> rows;
};

std::optional<ExternalTrace> read_external(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    if (!is || !std::getline(is, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "iter,f,wall_nanos") return std::nullopt;
    ExternalTrace t;
    t.label = p.stem().string();
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 3) return std::nullopt;
        try {
            std::size_t used = 0;
            const long it = std::stol(f[0], &used);
            if (used != f[0].size()) return std::nullopt;
            const double v = std::stod(f[1], &used);
            if (used != f[1].size()) return std::nullopt;
            const long long ns = std::stoll(f[2], &used);
            if (used != f[2].size()) return std::nullopt;
            t.rows.emplace_back(it, v, ns);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return t;
}

int cmd_verify(const std::string& scope) {
    std::vector<suites::Check> checks;
    const bool all = scope == "all";
    if (all || scope == "scalar_identities") {
        auto c = suites::scalar_identities();
        checks.insert(checks.end(), c.begin(), c.end());
    }
    if (all || scope == "numerics") {
        auto c = suites::numerics();
        checks.insert(checks.end(), c.begin(), c.end());
    }
    if (all || scope == "derivatives" || scope == "self_concordance") {
        const auto bundles = suites::default_bundles();
        if (all || scope == "derivatives") {
            auto c = suites::derivatives(bundles);
            checks.insert(checks.end(), c.begin(), c.end());
        }
        if (all || scope == "self_concordance") {
            auto c = suites::self_concordance(bundles);
            checks.insert(checks.end(), c.begin(), c.end());
        }
    }
    for (const suites::Check& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": worst " << c.worst << " (limit " << c.limit
                  << ")";
        if (!c.detail.empty()) std::cout << " [" << c.detail << "]";
        std::cout << "\n";
    }
    const bool ok = suites::all_passed(checks);
    std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sconcord: second-order methods for F-based self-concordant objectives"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(artifact_version));

    // gen
    problems::GeneratorConfig gen_cfg;
    std::string gen_problem;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    CLI::App* gen = app.add_subcommand("gen", "generate a problem instance (matrix container + JSON sidecar)");
    gen->add_option("problem", gen_problem, "problem name")->required();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out", gen_out, "output path; sidecar goes to <out>.json");
    add_generator_flags(gen, gen_cfg);

    // solve
    problems::GeneratorConfig solve_gen;
    RunOptions run;
    std::string solve_problem, solve_instance, solve_method = "arm_newton", solve_config, report_path, trace_path;
    std::uint64_t solve_seed = 0;
    bool deterministic = false;
    CLI::App* solve = app.add_subcommand("solve", "run one method on one problem");
    solve->add_option("--problem", solve_problem, "generate this problem in memory");
    solve->add_option("--instance", solve_instance, "or load an instance written by gen");
    solve->add_option("--method", solve_method)->capture_default_str();
    solve->add_option("--seed", solve_seed)->capture_default_str();
    solve->add_option("--config", solve_config, "JSON file with arm/rnm/newton_cg/ippm/generator blocks");
    solve->add_option("--report", report_path, "report JSON path");
    solve->add_option("--trace", trace_path, "trace CSV path");
    solve->add_option("--max-iters", run.arm.max_iters, "ARM iteration cap")->capture_default_str();
    solve->add_option("--eps", run.arm.eps, "ARM first-order tolerance")->capture_default_str();
    solve->add_flag("--deterministic", deterministic, "single-threaded, zeroed wall clocks");
    add_generator_flags(solve, solve_gen);

    // verify
    std::string scope = "all";
    CLI::App* verify = app.add_subcommand("verify", "run invariant suites");
    verify->add_option("scope", scope, "derivatives | self_concordance | scalar_identities | numerics | all")
        ->check(CLI::IsMember({"derivatives", "self_concordance", "scalar_identities", "numerics", "all"}));

    // bench
    problems::GeneratorConfig bench_gen;
    std::string bench_methods = "rnm,arm_newton,arm_negcurv", bench_problem = "nmf_mse", bench_sizes, bench_out = "bench_out",
                bench_baselines, bench_config;
    int bench_seeds = 5;
    bool bench_det = false;
    CLI::App* bench = app.add_subcommand("bench", "methods x seeds x sizes grid with aggregate tables");
    bench->add_option("--methods", bench_methods, "comma-separated methods")->capture_default_str();
    bench->add_option("--problem", bench_problem)->capture_default_str();
    bench->add_option("--seeds", bench_seeds)->capture_default_str();
    bench->add_option("--sizes", bench_sizes, "NMF sizes as mxnxr, comma-separated (default: the --m/--n/--r flags)");
    bench->add_option("--baselines", bench_baselines, "directory of external iter,f,wall_nanos CSVs");
    bench->add_option("--config", bench_config, "JSON solver config");
    bench->add_option("--out", bench_out)->capture_default_str();
    bench->add_flag("--deterministic", bench_det);
    add_generator_flags(bench, bench_gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            const problems::ProblemKind kind = problems::parse_problem(gen_problem);
            if (gen_out.empty()) gen_out = std::string(problems::to_string(kind)) + "_seed" + std::to_string(gen_seed) + ".bin";
            const problems::ProblemBundle b = problems::make_bundle(kind, gen_seed, gen_cfg);
            io::save_instance(b, gen_cfg, gen_out);
            std::cout << "wrote " << gen_out << " and " << io::sidecar_path(gen_out) << "\n";
            if (b.optimal_value_hint) std::cout << "optimal_value_hint " << fmt(*b.optimal_value_hint) << "\n";
            return 0;
        }
        if (*solve) {
            if (solve_problem.empty() == solve_instance.empty())
                throw UsageError("give exactly one of --problem or --instance");
            if (!solve_config.empty()) apply_config(read_json_file(solve_config), run, solve_gen);
            run.method = problems::parse_method(solve_method);
            run.seed = solve_seed;
            run.deterministic = deterministic;
            const problems::ProblemBundle b = solve_instance.empty()
                                                  ? problems::make_bundle(problems::parse_problem(solve_problem),
                                                                          solve_seed, solve_gen)
                                                  : io::load_instance(solve_instance);
            if (!problems::compatible(run.method, b.kind))
                throw UsageError(std::string("method ") + problems::to_string(run.method) + " is not applicable to " +
                                 problems::to_string(b.kind));
            const RunResult r = run_method(b, run);
            const json rep = report_json(r);
            if (!report_path.empty()) write_text(report_path, rep.dump(2) + "\n");
            if (!trace_path.empty()) write_text(trace_path, trace_text(r));
            std::cout << r.problem << " / " << r.method << ": " << r.status << ", f " << fmt(r.final_f);
            if (r.gap) std::cout << ", gap " << *r.gap;
            std::cout << ", nu " << r.final_nu << ", iterations " << r.iterations << "\n";
            if (!r.message.empty()) std::cout << r.message << "\n";
            return 0;
        }
        if (*verify) return cmd_verify(scope);
        if (*bench) {
            if (!bench_config.empty()) apply_config(read_json_file(bench_config), run, bench_gen);
            const problems::ProblemKind kind = problems::parse_problem(bench_problem);
            std::vector<problems::MethodKind> methods;
            for (const std::string& m : split(bench_methods, ',')) {
                methods.push_back(problems::parse_method(m));
                if (!problems::compatible(methods.back(), kind))
                    throw UsageError("method " + m + " is not applicable to " + bench_problem);
            }
            if (bench_seeds < 1) throw UsageError("--seeds must be >= 1");
            std::vector<problems::GeneratorConfig> sizes;
            if (bench_sizes.empty()) {
                sizes.push_back(bench_gen);
            } else {
                for (const std::string& s : split(bench_sizes, ',')) {
                    const std::vector<std::string> d = split(s, 'x');
                    if (d.size() != 3) throw UsageError("bad size '" + s + "', expected mxnxr");
                    problems::GeneratorConfig g = bench_gen;
                    g.m = std::stoi(d[0]);
                    g.n = std::stoi(d[1]);
                    g.r = std::stoi(d[2]);
                    sizes.push_back(g);
                }
            }

            struct Job {
                std::size_t size_idx;
                problems::MethodKind method;
                int seed;
            };
            std::vector<Job> jobs;
            for (std::size_t s = 0; s < sizes.size(); ++s)
                for (problems::MethodKind m : methods)
                    for (int seed = 0; seed < bench_seeds; ++seed) jobs.push_back({s, m, seed});
            std::vector<std::optional<RunResult>> results(jobs.size());
            std::vector<std::string> errors(jobs.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) {
                    const Job& jb = jobs[i];
                    try {
                        const problems::ProblemBundle b =
                            problems::make_bundle(kind, static_cast<std::uint64_t>(jb.seed), sizes[jb.size_idx]);
                        RunOptions o = run;
                        o.method = jb.method;
                        o.seed = static_cast<std::uint64_t>(jb.seed);
                        o.deterministic = bench_det;
                        results[i] = run_method(b, o);
                    } catch (const std::exception& e) {
                        errors[i] = e.what();
                    }
                }
            };
            const int nw = std::min<int>(worker_count(bench_det), static_cast<int>(jobs.size()));
            std::vector<std::thread> pool;
            for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
            worker();
            for (std::thread& t : pool) t.join();

            fs::create_directories(fs::path(bench_out) / "runs");
            std::ostringstream runs_csv, agg_csv, traj_csv;
            runs_csv << "size,method,seed,status,final_f,gap,iterations,grad_calls,hess_calls,hvp_count,wall_nanos\n";
            agg_csv << "size,method,runs,median_final_f,median_gap,median_iterations,median_hvp,median_wall_nanos\n";
            traj_csv << "size,method,iter,median_f,median_gap\n";
            int failures = 0;
            for (std::size_t s = 0; s < sizes.size(); ++s) {
                const std::string size_tag = std::to_string(sizes[s].m) + "x" + std::to_string(sizes[s].n) + "x" +
                                             std::to_string(sizes[s].r);
                for (problems::MethodKind m : methods) {
                    std::vector<double> ff, gg, it, hv, wall;
                    std::map<long, std::vector<double>> traj_f, traj_gap;
                    for (std::size_t i = 0; i < jobs.size(); ++i) {
                        if (jobs[i].size_idx != s || jobs[i].method != m) continue;
                        const std::string stem = size_tag + "_" + problems::to_string(m) + "_seed" +
                                                 std::to_string(jobs[i].seed);
                        if (!results[i]) {
                            std::cerr << "run " << stem << " failed: " << errors[i] << "\n";
                            ++failures;
                            continue;
                        }
                        const RunResult& r = *results[i];
                        write_text((fs::path(bench_out) / "runs" / (stem + ".json")).string(),
                                   report_json(r).dump(2) + "\n");
                        write_text((fs::path(bench_out) / "runs" / (stem + ".csv")).string(), trace_text(r));
                        runs_csv << size_tag << ',' << r.method << ',' << jobs[i].seed << ',' << r.status << ','
                                 << fmt(r.final_f) << ',' << (r.gap ? fmt(*r.gap) : "") << ',' << r.iterations << ','
                                 << r.calls.gradient << ',' << r.calls.hessian << ',' << r.hvp_count << ','
                                 << r.wall_nanos << "\n";
                        ff.push_back(r.final_f);
                        if (r.gap) gg.push_back(*r.gap);
                        it.push_back(static_cast<double>(r.iterations));
                        hv.push_back(static_cast<double>(r.hvp_count));
                        wall.push_back(static_cast<double>(r.wall_nanos));
                        const double hint = r.gap ? r.final_f - *r.gap : std::numeric_limits<double>::quiet_NaN();
                        for (const io::TraceRow& row : r.trace) {
                            traj_f[row.iter].push_back(row.f);
                            if (r.gap) traj_gap[row.iter].push_back(row.f - hint);
                        }
                    }
                    agg_csv << size_tag << ',' << problems::to_string(m) << ',' << ff.size() << ',' << fmt(median(ff))
                            << ',' << (gg.empty() ? "" : fmt(median(gg))) << ',' << median(it) << ','
                            << median(hv) << ',' << fmt(median(wall)) << "\n";
                    for (const auto& [k, v] : traj_f)
                        traj_csv << size_tag << ',' << problems::to_string(m) << ',' << k << ',' << fmt(median(v))
                                 << ',' << (traj_gap.count(k) ? fmt(median(traj_gap[k])) : "") << "\n";
                }
            }
            if (!bench_baselines.empty()) {
                if (!fs::is_directory(bench_baselines)) {
                    std::cerr << "warning: baseline directory '" << bench_baselines << "' not found, skipping\n";
                } else {
                    std::vector<fs::path> files;
                    for (const auto& e : fs::directory_iterator(bench_baselines))
                        if (e.path().extension() == ".csv") files.push_back(e.path());
                    std::sort(files.begin(), files.end());
                    for (const fs::path& p : files) {
                        const std::optional<ExternalTrace> t = read_external(p);
                        if (!t) {
                            std::cerr << "warning: skipping malformed baseline " << p.string() << "\n";
                            continue;
                        }
                        for (const auto& [k, v, ns] : t->rows)
                            traj_csv << "external,external:" << t->label << ',' << k << ',' << fmt(v) << ",\n";
                    }
                }
            }
            write_text((fs::path(bench_out) / "runs.csv").string(), runs_csv.str());
            write_text((fs::path(bench_out) / "aggregate.csv").string(), agg_csv.str());
            write_text((fs::path(bench_out) / "trajectories.csv").string(), traj_csv.str());
            std::cout << agg_csv.str();
            return failures ? 1 : 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
