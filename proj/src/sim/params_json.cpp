#include "tumorgnn/sim/params_json.hpp"

namespace tumorgnn::sim {

using nlohmann::json;

void to_json(json& j, const IntrinsicParams& p) {
    j = json{{"birth_eff", p.birth_eff},       {"birth_res", p.birth_res},
             {"success_eff", p.success_eff},   {"success_res", p.success_res},
             {"lifespan_eff", p.lifespan_eff}, {"lifespan_res", p.lifespan_res}};
}

void from_json(const json& j, IntrinsicParams& p) {
    IntrinsicParams d = p;
    p.birth_eff = j.value("birth_eff", d.birth_eff);
    p.birth_res = j.value("birth_res", d.birth_res);
    p.success_eff = j.value("success_eff", d.success_eff);
    p.success_res = j.value("success_res", d.success_res);
    p.lifespan_eff = j.value("lifespan_eff", d.lifespan_eff);
    p.lifespan_res = j.value("lifespan_res", d.lifespan_res);
}

void to_json(json& j, const KernelParams& p) {
    j = json{{"scale", p.scale}, {"width", p.width}, {"shape", p.shape}, {"cutoff", p.cutoff}};
}

void from_json(const json& j, KernelParams& p) {
    KernelParams d = p;
    p.scale = j.value("scale", d.scale);
    p.width = j.value("width", d.width);
    p.shape = j.value("shape", d.shape);
    p.cutoff = j.value("cutoff", d.cutoff);
}

void to_json(json& j, const GlobalParams& p) {
    j = json{{"mutation_probability", p.mutation_probability},
             {"mutation_increase", p.mutation_increase},
             {"density_kernel", p.density},
             {"birth_kernel", p.birth},
             {"success_kernel", p.success},
             {"lifespan_kernel", p.lifespan},
             {"max_birth_events", p.max_birth_events ? json(*p.max_birth_events) : json(nullptr)},
             {"max_sim_time", p.max_sim_time ? json(*p.max_sim_time) : json(nullptr)},
             {"rng_seed", p.rng_seed},
             {"max_rate", p.max_rate}};
}

void from_json(const json& j, GlobalParams& p) {
    p.mutation_probability = j.value("mutation_probability", p.mutation_probability);
    p.mutation_increase = j.value("mutation_increase", p.mutation_increase);
    if (j.contains("density_kernel")) j.at("density_kernel").get_to(p.density);
    if (j.contains("birth_kernel")) j.at("birth_kernel").get_to(p.birth);
    if (j.contains("success_kernel")) j.at("success_kernel").get_to(p.success);
    if (j.contains("lifespan_kernel")) j.at("lifespan_kernel").get_to(p.lifespan);
    if (j.contains("max_birth_events")) {
        const auto& v = j.at("max_birth_events");
        if (v.is_null()) p.max_birth_events.reset();
        else p.max_birth_events = v.get<std::uint64_t>();
    }
    if (j.contains("max_sim_time")) {
        const auto& v = j.at("max_sim_time");
        if (v.is_null()) p.max_sim_time.reset();
        else p.max_sim_time = v.get<double>();
    }
    p.rng_seed = j.value("rng_seed", p.rng_seed);
    p.max_rate = j.value("max_rate", p.max_rate);
}

}  // namespace tumorgnn::sim
