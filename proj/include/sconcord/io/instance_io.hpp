#pragma once

// Problem instances on disk: a matrix container plus a JSON sidecar at
// "<path>.json" holding dimensions, seed and fitted constants.

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "../problems/registry.hpp"
#include "matrix_container.hpp"
#include "version.hpp"

namespace sconcord::io {

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

inline nlohmann::json generator_json(const problems::GeneratorConfig& g) {
    return {{"m", g.m},       {"n", g.n},         {"r", g.r},
            {"noise", g.noise}, {"pr_n", g.pr_n}, {"pr_m", g.pr_m},
            {"barrier_dim", g.barrier_dim}, {"fit_samples", g.fit_samples}};
}

/// Writes the container and sidecar. Output depends only on the bundle, so
/// regenerating with the same seed reproduces both files byte for byte.
inline void save_instance(const problems::ProblemBundle& b, const problems::GeneratorConfig& g,
                          const std::string& path) {
    using namespace problems;
    nlohmann::json side;
    side["format"] = "sconcord-instance";
    side["format_version"] = 1;
    side["problem"] = to_string(b.kind);
    side["seed"] = b.seed;
    side["generator"] = generator_json(g);
    if (b.optimal_value_hint) side["optimal_value_hint"] = *b.optimal_value_hint;
    side["metadata"] = b.metadata;
    std::vector<NamedMatrix> mats;

    if (const auto* inst = std::get_if<NmfInstance>(&b.instance)) {
        side["m"] = inst->m;
        side["n"] = inst->n;
        side["r"] = inst->r;
        side["loss"] = to_string(inst->loss);
        side["noise"] = inst->noise;
        side["barrier_weight"] = inst->barrier_weight;
        side["quartic_weight"] = inst->quartic_weight;
        mats = {{"z", inst->z}, {"x_hat", inst->x_hat}, {"y_hat", inst->y_hat}};
    } else if (const auto* p = std::get_if<PhaseRetrievalInstance>(&b.instance)) {
        side["n"] = p->n();
        side["m"] = p->m();
        side["ell"] = p->ell;
        side["kappa"] = p->kappa;
        mats = {{"sensing_real", p->sensing_real},
                {"sensing_imag", p->sensing_imag},
                {"targets", p->targets},
                {"planted", p->planted}};
    } else if (const auto* ref = std::get_if<PolynomialReference>(&b.instance)) {
        side["degree_bound"] = ref->degree_bound;
        side["weight"] = ref->weight;
        side["kappa_ref"] = ref->kappa_ref;
    } else {
        side["dim"] = std::get<int>(b.instance);
    }
    write_container(path, mats);
    std::ofstream os(sidecar_path(path), std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + sidecar_path(path) + "' for writing");
    os << side.dump(2) << "\n";
}

inline nlohmann::json read_sidecar(const std::string& path) {
    std::ifstream is(sidecar_path(path));
    if (!is) throw std::runtime_error("cannot open sidecar '" + sidecar_path(path) + "'");
    return nlohmann::json::parse(is);
}

inline problems::ProblemBundle load_instance(const std::string& path) {
    using namespace problems;
    const nlohmann::json side = read_sidecar(path);
    if (side.value("format", "") != "sconcord-instance") throw std::runtime_error("not a sconcord instance sidecar");
    const ProblemKind kind = parse_problem(side.at("problem").get<std::string>());
    const auto seed = side.at("seed").get<std::uint64_t>();
    const std::vector<NamedMatrix> mats = read_container(path);

    switch (kind) {
        case ProblemKind::nmf_mse:
        case ProblemKind::nmf_kl: {
            NmfInstance inst;
            inst.m = side.at("m");
            inst.n = side.at("n");
            inst.r = side.at("r");
            inst.seed = seed;
            inst.loss = kind == ProblemKind::nmf_mse ? NmfLoss::frobenius : NmfLoss::kl;
            inst.noise = side.at("noise");
            inst.barrier_weight = side.at("barrier_weight");
            inst.quartic_weight = side.at("quartic_weight");
            inst.z = find_matrix(mats, "z");
            inst.x_hat = find_matrix(mats, "x_hat");
            inst.y_hat = find_matrix(mats, "y_hat");
            if (side.contains("optimal_value_hint")) inst.optimal_value_hint = side["optimal_value_hint"].get<double>();
            inst.weights_fitted = true;
            return bundle_from_nmf(inst);
        }
        case ProblemKind::phase_retrieval: {
            PhaseRetrievalInstance p;
            p.sensing_real = find_matrix(mats, "sensing_real");
            p.sensing_imag = find_matrix(mats, "sensing_imag");
            p.targets = find_matrix(mats, "targets").col(0);
            p.planted = find_matrix(mats, "planted").col(0);
            p.ell = side.at("ell");
            p.kappa = side.at("kappa");
            p.seed = seed;
            return bundle_from_phase(p);
        }
        case ProblemKind::polynomial_saddle: {
            PolynomialReference ref;
            ref.degree_bound = side.at("degree_bound");
            ref.weight = side.at("weight");
            ref.kappa_ref = side.at("kappa_ref");
            ref.reference = scale(polynomial_reference(2, ref.degree_bound / 2), ref.weight);
            return bundle_from_saddle(ref, seed);
        }
        case ProblemKind::log_barrier_demo: return bundle_from_barrier(side.at("dim").get<int>(), seed);
    }
    throw std::runtime_error("load_instance: unknown problem");
}

}  // namespace sconcord::io
