#include "tumorgnn/pipeline/config.hpp"

#include "tumorgnn/sim/params_json.hpp"

#include <algorithm>
#include <fstream>

namespace tumorgnn::pipeline {

using nlohmann::json;

const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

double PipelineConfig::required_end_time() const {
    double t = 0.0;
    for (const auto& c : cuts) t = std::max(t, c.t_end());
    return t;
}

void PipelineConfig::validate() const {
    try {
        sim.global.validate();
        sim.initial.validate();
        for (const auto& c : cuts) c.validate();
        features.validate();
        model.validate();
        train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (sim.initial_cells < 1) throw ConfigError("sim.initial_cells must be >= 1");
    if (sim.max_attempts < 1) throw ConfigError("sim.max_attempts must be >= 1");
    if (cuts.empty()) throw ConfigError("cuts must not be empty");
    if (tumors.train == 0 || tumors.val == 0 || tumors.test == 0)
        throw ConfigError("every split needs at least one tumor");
    if (dataset_mutation_probabilities.empty()) throw ConfigError("dataset_mutation_probabilities must not be empty");
    for (double p : dataset_mutation_probabilities)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("mutation probabilities must lie in [0,1]");
    for (double p : sweep.mutation_probabilities)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("sweep mutation probabilities must lie in [0,1]");
    if (patches.per_cut == 0) throw ConfigError("patches.per_cut must be >= 1");
    if (!(patches.radius > 0.0)) throw ConfigError("patches.radius must be > 0");
    if (patches.k == 0) throw ConfigError("patches.k must be >= 1");
    if (!(labeling.margin >= 0.0)) throw ConfigError("labeling.margin must be >= 0");
    if (sweep.tumors_per_level == 0) throw ConfigError("sweep.tumors_per_level must be >= 1");
    for (const auto& m : ablation_masks) {
        bgnn::ModelConfig probe = model;
        probe.feature_mask = m;
        try {
            probe.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("ablation mask: ") + e.what());
        }
    }
}

PipelineConfig paper_preset() {
    PipelineConfig c;
    c.sim.global.max_birth_events = 1000000;
    c.tumors = {160, 20, 20};
    c.patches.per_cut = 100;
    c.model.heads = 1;
    c.train.epochs = 200;
    c.train.decay_factor = 0.5;
    c.train.decay_period = 33;
    c.sweep.tumors_per_level = 20;
    c.ablation_masks = {{0}, {1}, {2}, {3}, {4}, {5}, {6}, {0, 1, 2, 3, 4, 5, 6}};
    return c;
}

PipelineConfig desk_preset() {
    PipelineConfig c;
    c.sim.global.max_birth_events = 100000;
    c.tumors = {16, 2, 2};
    c.patches.per_cut = 40;
    c.model.heads = 4;
    c.train.epochs = 25;
    c.train.decay_factor = 0.4;
    c.train.decay_period = 5;
    c.sweep.tumors_per_level = 4;
    c.ablation_masks = {{0}, {0, 1, 2, 3, 4, 5, 6}};
    return c;
}

PipelineConfig preset(const std::string& name) {
    if (name == "paper") return paper_preset();
    if (name == "desk") return desk_preset();
    throw ConfigError("unknown preset '" + name + "' (expected paper or desk)");
}

json cut_spec_json(const cut::CutSpec& s) {
    const char* axes[] = {"x", "y", "z"};
    return json{{"z_ref", s.z_ref},
                {"thickness", s.thickness},
                {"t_ref", s.t_ref},
                {"window", s.window},
                {"axis", axes[static_cast<int>(s.axis)]}};
}

cut::CutSpec cut_spec_from_json(const json& j) {
    cut::CutSpec s;
    s.z_ref = j.value("z_ref", s.z_ref);
    s.thickness = j.value("thickness", s.thickness);
    s.t_ref = j.value("t_ref", s.t_ref);
    s.window = j.value("window", s.window);
    std::string axis = j.value("axis", std::string("z"));
    if (axis == "x") s.axis = cut::Axis::x;
    else if (axis == "y") s.axis = cut::Axis::y;
    else if (axis == "z") s.axis = cut::Axis::z;
    else throw ConfigError("cut axis must be x, y or z");
    return s;
}

json model_config_json(const bgnn::ModelConfig& m) {
    return json{{"d", m.d},
                {"d_prime", m.d_prime},
                {"heads", m.heads},
                {"variant", bgnn::to_string(m.variant)},
                {"global_dim", m.global_dim},
                {"dropout", m.dropout},
                {"feature_mask", m.feature_mask},
                {"exact_gelu", m.exact_gelu},
                {"norm_alpha_init", m.norm_alpha_init},
                {"init_seed", m.init_seed}};
}

bgnn::ModelConfig model_config_from_json(const json& j, bgnn::ModelConfig m) {
    m.d = j.value("d", m.d);
    m.d_prime = j.value("d_prime", m.d_prime);
    m.heads = j.value("heads", m.heads);
    if (j.contains("variant")) {
        try {
            m.variant = bgnn::variant_from_string(j.at("variant").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    m.global_dim = j.value("global_dim", m.global_dim);
    m.dropout = j.value("dropout", m.dropout);
    if (j.contains("feature_mask")) m.feature_mask = j.at("feature_mask").get<std::vector<std::size_t>>();
    m.exact_gelu = j.value("exact_gelu", m.exact_gelu);
    m.norm_alpha_init = j.value("norm_alpha_init", m.norm_alpha_init);
    m.init_seed = j.value("init_seed", m.init_seed);
    return m;
}

json train_config_json(const bgnn::TrainConfig& t) {
    return json{{"epochs", t.epochs},         {"base_lr", t.base_lr},       {"decay_factor", t.decay_factor},
                {"decay_period", t.decay_period}, {"batch_size", t.batch_size}, {"seed", t.seed},
                {"eval_train_accuracy", t.eval_train_accuracy}};
}

bgnn::TrainConfig train_config_from_json(const json& j, bgnn::TrainConfig t) {
    t.epochs = j.value("epochs", t.epochs);
    t.base_lr = j.value("base_lr", t.base_lr);
    t.decay_factor = j.value("decay_factor", t.decay_factor);
    t.decay_period = j.value("decay_period", t.decay_period);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.seed = j.value("seed", t.seed);
    t.eval_train_accuracy = j.value("eval_train_accuracy", t.eval_train_accuracy);
    return t;
}

json to_json(const PipelineConfig& c) {
    json cuts = json::array();
    for (const auto& s : c.cuts) cuts.push_back(cut_spec_json(s));
    return json{
        {"master_seed", c.master_seed},
        {"sim",
         {{"global", c.sim.global},
          {"initial", c.sim.initial},
          {"initial_cells", c.sim.initial_cells},
          {"max_attempts", c.sim.max_attempts}}},
        {"tumors", {{"train", c.tumors.train}, {"val", c.tumors.val}, {"test", c.tumors.test}}},
        {"dataset_mutation_probabilities", c.dataset_mutation_probabilities},
        {"cuts", cuts},
        {"patches",
         {{"per_cut", c.patches.per_cut},
          {"radius", c.patches.radius},
          {"k", c.patches.k},
          {"min_nodes", c.patches.min_nodes},
          {"min_edges", c.patches.min_edges}}},
        {"labeling", {{"threshold", c.labeling.threshold}, {"margin", c.labeling.margin}}},
        {"features",
         {{"sigma", c.features.sigma},
          {"volume_samples", c.features.volume_samples},
          {"volume_seed", c.features.volume_seed}}},
        {"model", model_config_json(c.model)},
        {"train", train_config_json(c.train)},
        {"sweep",
         {{"mutation_probabilities", c.sweep.mutation_probabilities},
          {"tumors_per_level", c.sweep.tumors_per_level}}},
        {"ablation_masks", c.ablation_masks},
    };
}

PipelineConfig from_json(const json& j, PipelineConfig c) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        c.master_seed = j.value("master_seed", c.master_seed);
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            if (s.contains("global")) s.at("global").get_to(c.sim.global);
            if (s.contains("initial")) s.at("initial").get_to(c.sim.initial);
            c.sim.initial_cells = s.value("initial_cells", c.sim.initial_cells);
            c.sim.max_attempts = s.value("max_attempts", c.sim.max_attempts);
        }
        if (j.contains("tumors")) {
            const json& t = j.at("tumors");
            c.tumors.train = t.value("train", c.tumors.train);
            c.tumors.val = t.value("val", c.tumors.val);
            c.tumors.test = t.value("test", c.tumors.test);
        }
        if (j.contains("dataset_mutation_probabilities"))
            c.dataset_mutation_probabilities = j.at("dataset_mutation_probabilities").get<std::vector<double>>();
        if (j.contains("cuts")) {
            c.cuts.clear();
            for (const auto& s : j.at("cuts")) c.cuts.push_back(cut_spec_from_json(s));
        }
        if (j.contains("patches")) {
            const json& p = j.at("patches");
            c.patches.per_cut = p.value("per_cut", c.patches.per_cut);
            c.patches.radius = p.value("radius", c.patches.radius);
            c.patches.k = p.value("k", c.patches.k);
            c.patches.min_nodes = p.value("min_nodes", c.patches.min_nodes);
            c.patches.min_edges = p.value("min_edges", c.patches.min_edges);
        }
        if (j.contains("labeling")) {
            c.labeling.threshold = j.at("labeling").value("threshold", c.labeling.threshold);
            c.labeling.margin = j.at("labeling").value("margin", c.labeling.margin);
        }
        if (j.contains("features")) {
            const json& f = j.at("features");
            c.features.sigma = f.value("sigma", c.features.sigma);
            c.features.volume_samples = f.value("volume_samples", c.features.volume_samples);
            c.features.volume_seed = f.value("volume_seed", c.features.volume_seed);
        }
        if (j.contains("model")) c.model = model_config_from_json(j.at("model"), c.model);
        if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            if (s.contains("mutation_probabilities"))
                c.sweep.mutation_probabilities = s.at("mutation_probabilities").get<std::vector<double>>();
            c.sweep.tumors_per_level = s.value("tumors_per_level", c.sweep.tumors_per_level);
        }
        if (j.contains("ablation_masks"))
            c.ablation_masks = j.at("ablation_masks").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::string& path, const std::string& preset_name) {
    PipelineConfig base = preset(preset_name);
    if (path.empty()) {
        base.validate();
        return base;
    }
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j, base);
}

}  // namespace tumorgnn::pipeline
