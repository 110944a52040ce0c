#pragma once

// Named problems and the method/problem compatibility matrix used by the CLI.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <sstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "barrier.hpp"
#include "nmf.hpp"
#include "phase_retrieval.hpp"
#include "polynomial.hpp"

namespace sconcord::problems {

enum class ProblemKind { nmf_mse, nmf_kl, phase_retrieval, polynomial_saddle, log_barrier_demo };
enum class MethodKind { rnm, arm_newton, arm_negcurv, arm_precond_gd, ippm, newton_cg };

inline constexpr std::array<ProblemKind, 5> all_problems{ProblemKind::nmf_mse, ProblemKind::nmf_kl,
                                                         ProblemKind::phase_retrieval, ProblemKind::polynomial_saddle,
                                                         ProblemKind::log_barrier_demo};
inline constexpr std::array<MethodKind, 6> all_methods{MethodKind::rnm,        MethodKind::arm_newton,
                                                       MethodKind::arm_negcurv, MethodKind::arm_precond_gd,
                                                       MethodKind::ippm,       MethodKind::newton_cg};

inline const char* to_string(ProblemKind p) {
    switch (p) {
        case ProblemKind::nmf_mse: return "nmf_mse";
        case ProblemKind::nmf_kl: return "nmf_kl";
        case ProblemKind::phase_retrieval: return "phase_retrieval";
        case ProblemKind::polynomial_saddle: return "polynomial_saddle";
        case ProblemKind::log_barrier_demo: return "log_barrier_demo";
    }
    return "unknown";
}

inline const char* to_string(MethodKind m) {
    switch (m) {
        case MethodKind::rnm: return "rnm";
        case MethodKind::arm_newton: return "arm_newton";
        case MethodKind::arm_negcurv: return "arm_negcurv";
        case MethodKind::arm_precond_gd: return "arm_precond_gd";
        case MethodKind::ippm: return "ippm";
        case MethodKind::newton_cg: return "newton_cg";
    }
    return "unknown";
}

inline ProblemKind parse_problem(const std::string& s) {
    for (ProblemKind p : all_problems)
        if (s == to_string(p)) return p;
    throw std::invalid_argument("unknown problem '" + s + "'");
}

inline MethodKind parse_method(const std::string& s) {
    for (MethodKind m : all_methods)
        if (s == to_string(m)) return m;
    throw std::invalid_argument("unknown method '" + s + "'");
}

/// newton_cg needs a convex self-concordant objective; ippm a weakly
/// self-concordant one with a quadratic reference.
inline bool compatible(MethodKind m, ProblemKind p) {
    switch (m) {
        case MethodKind::newton_cg: return p == ProblemKind::log_barrier_demo;
        case MethodKind::ippm: return p == ProblemKind::phase_retrieval;
        default: return true;
    }
}

struct GeneratorConfig {
    int m = 20;
    int n = 10;
    int r = 5;
    double noise = 0.01;
    int pr_n = 4;
    int pr_m = 12;
    int barrier_dim = 20;
    int fit_samples = 60;
};

using Instance = std::variant<NmfInstance, PhaseRetrievalInstance, PolynomialReference, int>;

/// Everything a solver run needs besides the method's own configuration.
struct ProblemBundle {
    ProblemKind kind = ProblemKind::log_barrier_demo;
    std::uint64_t seed = 0;
    ReferencePair pair;
    Sampler sampler;
    Vector x0;
    std::optional<double> optimal_value_hint;
    std::optional<double> weak_sc_ell;  // (kappa, ell)-weak self-concordance, phase retrieval only
    std::map<std::string, std::string> metadata;
    Instance instance;
};

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

inline ProblemBundle bundle_from_nmf(const NmfInstance& inst) {
    ProblemBundle b;
    b.kind = inst.loss == NmfLoss::frobenius ? ProblemKind::nmf_mse : ProblemKind::nmf_kl;
    b.seed = inst.seed;
    b.pair = nmf_oracles(inst);
    b.sampler = nmf_sampler(inst);
    b.x0 = nmf_initial_point(inst, derive_seed(inst.seed, 11));
    b.optimal_value_hint = inst.optimal_value_hint;
    b.metadata["barrier_weight"] = detail::num(inst.barrier_weight);
    b.metadata["quartic_weight"] = detail::num(inst.quartic_weight);
    b.metadata["kappa_ref"] = detail::num(*b.pair.kappa_ref);
    b.metadata["weights"] = "fitted by sampled self-concordance checks (instance-specific, not a closed form)";
    b.instance = inst;
    return b;
}

inline ProblemBundle bundle_from_phase(const PhaseRetrievalInstance& p) {
    ProblemBundle b;
    b.kind = ProblemKind::phase_retrieval;
    b.seed = p.seed;
    b.pair = phase_oracles(p);
    b.sampler = phase_sampler(p);
    b.x0 = phase_initial_point(p, derive_seed(p.seed, 11));
    b.optimal_value_hint = 0.0;  // noise-free targets: the planted signal attains 0
    b.weak_sc_ell = p.ell;
    b.metadata["ell"] = detail::num(p.ell);
    b.metadata["kappa"] = detail::num(p.kappa);
    b.instance = p;
    return b;
}

inline ProblemBundle bundle_from_saddle(const PolynomialReference& ref, std::uint64_t seed) {
    ProblemBundle b;
    b.kind = ProblemKind::polynomial_saddle;
    b.seed = seed;
    b.pair.objective = saddle_objective();
    b.pair.reference = ref.reference;
    b.pair.kappa = 1.0;
    b.pair.kappa_ref = ref.kappa_ref;
    b.pair.lower_bound_hint = -0.25;
    b.sampler = radial_sampler(2);
    b.x0 = Vector::Zero(2);
    b.optimal_value_hint = -0.25;
    b.metadata["weight"] = detail::num(ref.weight);
    b.metadata["kappa_ref"] = detail::num(ref.kappa_ref);
    b.instance = ref;
    return b;
}

inline ProblemBundle bundle_from_barrier(int dim, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("bundle_from_barrier: dimension must be positive");
    ProblemBundle b;
    b.kind = ProblemKind::log_barrier_demo;
    b.seed = seed;
    b.pair.objective = log_barrier_demo(dim);
    b.pair.reference = zero_function(dim);
    b.pair.kappa = 1.0;
    b.pair.kappa_ref = 0.0;
    b.pair.lower_bound_hint = static_cast<double>(dim);
    b.sampler = orthant_sampler(dim);
    Rng rng(derive_seed(seed, 11));
    b.x0.resize(dim);
    for (int i = 0; i < dim; ++i) b.x0[i] = rng.uniform(0.2, 5.0);
    b.optimal_value_hint = static_cast<double>(dim);
    b.instance = dim;
    return b;
}

inline ProblemBundle make_bundle(ProblemKind kind, std::uint64_t seed, const GeneratorConfig& g = {}) {
    switch (kind) {
        case ProblemKind::nmf_mse: {
            NmfInstance inst = make_nmf_mse(g.m, g.n, g.r, seed, false);
            fit_nmf_weights(inst, {g.fit_samples, 4, derive_seed(seed, 7), 4.0});
            return bundle_from_nmf(inst);
        }
        case ProblemKind::nmf_kl: {
            NmfInstance inst = make_nmf_kl(g.m, g.n, g.r, g.noise, seed, false);
            fit_nmf_weights(inst, {g.fit_samples, 4, derive_seed(seed, 7), 4.0});
            return bundle_from_nmf(inst);
        }
        case ProblemKind::phase_retrieval: return bundle_from_phase(make_phase_retrieval(g.pr_n, g.pr_m, seed));
        case ProblemKind::polynomial_saddle:
            return bundle_from_saddle(polynomial_reference_fit(saddle_objective(), 2, 200, derive_seed(seed, 7)), seed);
        case ProblemKind::log_barrier_demo: return bundle_from_barrier(g.barrier_dim, seed);
    }
    throw std::invalid_argument("make_bundle: unknown problem");
}

}  // namespace sconcord::problems
