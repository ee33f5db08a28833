#include "tumorgnn/pipeline/commands.hpp"

#include "tumorgnn/bgnn/train.hpp"
#include "tumorgnn/nn/checkpoint.hpp"
#include "tumorgnn/sim/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tumorgnn::pipeline {

using nlohmann::json;

namespace {

void prepare_outputs(const fs::path& dir, const std::vector<std::string>& names, bool force) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    if (force) return;
    for (const auto& n : names)
        if (fs::exists(dir / n))
            throw DataError((dir / n).string() + " already exists; pass --force to overwrite");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write " + path.string());
    os << text;
    if (!os) throw DataError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot read " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string trace_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "tumor_%03zu.trace", index);
    return buf;
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw DataError("unknown split '" + s + "'");
}

const char* kSplitFiles[] = {"train.jsonl", "val.jsonl", "test.jsonl"};

void check_dataset_features(const std::vector<bgnn::LabeledGraph>& graphs, const bgnn::ModelConfig& m) {
    for (const auto& g : graphs)
        if (g.x.cols != feat::kNumFeatures)
            throw ConfigError("dataset rows carry " + std::to_string(g.x.cols) + " features, model expects " +
                              std::to_string(feat::kNumFeatures));
    for (std::size_t f : m.feature_mask)
        if (f >= feat::kNumFeatures) throw ConfigError("feature mask refers to a column the dataset does not have");
}

json train_report(const bgnn::Model& model, const bgnn::TrainResult& res, const std::vector<bgnn::LabeledGraph>& tr,
                  const std::vector<bgnn::LabeledGraph>& va, const std::vector<bgnn::LabeledGraph>& te,
                  std::size_t batch) {
    json r;
    r["model"] = model.config().label();
    r["parameters"] = model.params().scalar_count();
    r["best_epoch"] = res.best_epoch;
    r["best"] = {{"train_acc", bgnn::evaluate(model, tr, batch)},
                 {"val_acc", bgnn::evaluate(model, va, batch)},
                 {"test_acc", bgnn::evaluate(model, te, batch)}};
    return r;
}

}  // namespace

json cmd_simulate(const PipelineConfig& cfg, const fs::path& out_dir, bool force) {
    auto alloc = tumor_allocation(cfg);
    std::vector<std::string> names{"manifest.json"};
    for (std::size_t i = 0; i < alloc.size(); ++i) names.push_back(trace_name(i));
    prepare_outputs(out_dir, names, force);

    json tumors = json::array();
    for (std::size_t i = 0; i < alloc.size(); ++i) {
        SimulatedTumor st = simulate_tumor(cfg, 0, i, alloc[i].second);
        st.entry.split = alloc[i].first;
        st.entry.file = trace_name(i);
        sim::write_trace_file((out_dir / st.entry.file).string(), st.history);
        tumors.push_back(json{{"index", i},
                              {"split", to_string(st.entry.split)},
                              {"p_mut", st.entry.p_mut},
                              {"seed", st.entry.seed},
                              {"attempts", st.entry.attempts},
                              {"end_time", st.entry.end_time},
                              {"birth_count", st.entry.birth_count},
                              {"file", st.entry.file}});
    }
    json manifest{{"config", to_json(cfg)}, {"tumors", tumors}};
    write_json(out_dir / "manifest.json", manifest);
    return manifest;
}

json cmd_dataset(const PipelineConfig& cfg, const fs::path& traces_dir, const fs::path& out_dir, bool force) {
    json manifest = read_json(traces_dir / "manifest.json");
    prepare_outputs(out_dir, {"train.jsonl", "val.jsonl", "test.jsonl", "stats.json"}, force);

    std::vector<SimulatedTumor> tumors;
    try {
        for (const auto& t : manifest.at("tumors")) {
            SimulatedTumor st;
            st.entry.index = t.at("index").get<std::size_t>();
            st.entry.split = split_from_string(t.at("split").get<std::string>());
            st.entry.p_mut = t.at("p_mut").get<double>();
            st.entry.seed = t.at("seed").get<std::uint64_t>();
            st.entry.file = t.at("file").get<std::string>();
            try {
                st.history = sim::read_trace_file((traces_dir / st.entry.file).string());
            } catch (const std::exception& e) {
                throw DataError("trace " + st.entry.file + ": " + e.what());
            }
            tumors.push_back(std::move(st));
        }
    } catch (const json::exception& e) {
        throw DataError("manifest: " + std::string(e.what()));
    }

    Dataset ds = build_dataset(cfg, tumors);
    for (std::size_t s = 0; s < 3; ++s) {
        std::ostringstream os;
        for (const auto& r : ds.splits[s]) os << record_to_json(r).dump() << '\n';
        write_text(out_dir / kSplitFiles[s], os.str());
    }
    json stats = ds.stats;
    stats["config"] = to_json(cfg);
    write_json(out_dir / "stats.json", stats);
    return ds.stats;
}

std::vector<PatchRecord> load_split(const fs::path& dataset_dir, Split s) {
    const fs::path path = dataset_dir / kSplitFiles[static_cast<int>(s)];
    std::ifstream is(path);
    if (!is) throw DataError("cannot read " + path.string());
    std::vector<PatchRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (out.empty()) throw DataError(path.string() + " holds no patches");
    return out;
}

std::vector<bgnn::LabeledGraph> load_labeled_split(const fs::path& dataset_dir, Split s) {
    std::vector<bgnn::LabeledGraph> out;
    for (const auto& r : load_split(dataset_dir, s)) out.push_back(to_labeled(r));
    return out;
}

json cmd_train(const PipelineConfig& cfg, const fs::path& dataset_dir, const fs::path& out_dir, bool force) {
    auto tr = load_labeled_split(dataset_dir, Split::train);
    auto va = load_labeled_split(dataset_dir, Split::val);
    auto te = load_labeled_split(dataset_dir, Split::test);
    check_dataset_features(tr, cfg.model);
    prepare_outputs(out_dir, {"metrics.csv", "checkpoint.bin", "final_checkpoint.bin", "report.json"}, force);

    bgnn::Model model(cfg.model);
    bgnn::TrainResult res = bgnn::train(model, tr, va, cfg.train);

    std::ostringstream csv;
    bgnn::write_metrics_csv(csv, res.history);
    write_text(out_dir / "metrics.csv", csv.str());

    const std::string model_json = model_config_json(cfg.model).dump();
    nn::save_checkpoint(out_dir / "checkpoint.bin", nn::capture(model.params(), res.adam, model_json, res.best_epoch));

    json report = train_report(model, res, tr, va, te, cfg.train.batch_size);
    report["train_config"] = train_config_json(cfg.train);
    report["model_config"] = model_config_json(cfg.model);

    model.params().restore(res.final_params);
    nn::save_checkpoint(out_dir / "final_checkpoint.bin",
                        nn::capture(model.params(), res.adam, model_json, cfg.train.epochs - 1));
    report["final"] = {{"train_acc", bgnn::evaluate(model, tr, cfg.train.batch_size)},
                       {"val_acc", bgnn::evaluate(model, va, cfg.train.batch_size)},
                       {"test_acc", bgnn::evaluate(model, te, cfg.train.batch_size)}};
    write_json(out_dir / "report.json", report);
    return report;
}

json cmd_eval(const fs::path& checkpoint, const fs::path& dataset_dir) {
    nn::Checkpoint ck;
    try {
        ck = nn::load_checkpoint(checkpoint);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    bgnn::ModelConfig mc;
    try {
        mc = model_config_from_json(json::parse(ck.config));
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint config: ") + e.what());
    }
    bgnn::Model model(mc);
    try {
        nn::apply(ck, model.params());
    } catch (const std::exception& e) {
        throw DataError(std::string("checkpoint does not match its model config: ") + e.what());
    }
    json out{{"model", mc.label()}, {"epoch", ck.epoch}};
    for (Split s : {Split::train, Split::val, Split::test}) {
        auto graphs = load_labeled_split(dataset_dir, s);
        check_dataset_features(graphs, mc);
        out[std::string(to_string(s)) + "_acc"] = bgnn::evaluate(model, graphs);
    }
    return out;
}

json cmd_ablate(const PipelineConfig& cfg, const fs::path& dataset_dir, const fs::path& out_dir, bool force) {
    if (cfg.ablation_masks.empty()) throw ConfigError("ablation_masks is empty");
    auto tr = load_labeled_split(dataset_dir, Split::train);
    auto va = load_labeled_split(dataset_dir, Split::val);
    auto te = load_labeled_split(dataset_dir, Split::test);
    check_dataset_features(tr, cfg.model);
    prepare_outputs(out_dir, {"ablation.csv", "ablation.json"}, force);

    auto rows = bgnn::ablate(cfg.model, cfg.ablation_masks, tr, va, te, cfg.train);
    std::ostringstream csv;
    csv << "features,train_acc,val_acc,test_acc\n" << std::setprecision(17);
    json out = json::array();
    for (const auto& r : rows) {
        std::string name;
        for (std::size_t f : r.mask) name += (name.empty() ? "" : " ") + std::to_string(f);
        csv << '"' << name << "\"," << r.train_acc << ',' << r.val_acc << ',' << r.test_acc << '\n';
        out.push_back(json{{"features", r.mask},
                           {"train_acc", r.train_acc},
                           {"val_acc", r.val_acc},
                           {"test_acc", r.test_acc}});
    }
    json report{{"model", cfg.model.label()}, {"rows", out}};
    write_text(out_dir / "ablation.csv", csv.str());
    write_json(out_dir / "ablation.json", report);
    return report;
}

json trend_table(const std::vector<double>& p_mut, const std::vector<double>& high_fraction) {
    json rows = json::array();
    for (std::size_t i = 0; i < p_mut.size(); ++i)
        rows.push_back(json{{"p_mut", p_mut[i]}, {"high_fraction", high_fraction[i]}});
    return json{{"levels", rows}, {"spearman", spearman(p_mut, high_fraction)}};
}

json cmd_sweep_report(const PipelineConfig& cfg, const fs::path& out_dir, bool force) {
    const auto& levels = cfg.sweep.mutation_probabilities;
    if (levels.size() < 3) throw ConfigError("sweep needs at least 3 mutation probabilities");
    prepare_outputs(out_dir, {"sweep.csv", "sweep.json"}, force);

    std::vector<double> fractions;
    json detail = json::array();
    for (std::size_t li = 0; li < levels.size(); ++li) {
        FilterCounts fc;
        std::vector<double> entropies;
        std::size_t high = 0, labeled = 0;
        json seeds = json::array();
        for (std::size_t t = 0; t < cfg.sweep.tumors_per_level; ++t) {
            SimulatedTumor st = simulate_tumor(cfg, 1 + li, t, levels[li]);
            seeds.push_back(st.entry.seed);
            for (const auto& r : tumor_patches(st.history, st.entry.seed, cfg, false, fc)) {
                ++labeled;
                high += r.label.cls == label::HeterogeneityClass::high;
                entropies.push_back(r.label.entropy);
            }
        }
        if (labeled == 0)
            throw DataError("sweep level p_mut=" + std::to_string(levels[li]) + " produced no labeled patches: " +
                            fc.to_json().dump());
        const double frac = static_cast<double>(high) / static_cast<double>(labeled);
        fractions.push_back(frac);
        double mean_u = 0.0;
        for (double u : entropies) mean_u += u;
        mean_u /= static_cast<double>(entropies.size());
        detail.push_back(json{{"p_mut", levels[li]},
                              {"labeled_patches", labeled},
                              {"high", high},
                              {"high_fraction", frac},
                              {"mean_entropy", mean_u},
                              {"filters", fc.to_json()},
                              {"tumor_seeds", seeds}});
    }
    json report = trend_table(levels, fractions);
    report["levels"] = detail;

    std::ostringstream csv;
    csv << "p_mut,labeled_patches,high,high_fraction,mean_entropy\n" << std::setprecision(17);
    for (const auto& d : detail)
        csv << d["p_mut"].get<double>() << ',' << d["labeled_patches"].get<std::size_t>() << ','
            << d["high"].get<std::size_t>() << ',' << d["high_fraction"].get<double>() << ','
            << d["mean_entropy"].get<double>() << '\n';
    write_text(out_dir / "sweep.csv", csv.str());
    write_json(out_dir / "sweep.json", report);
    return report;
}

}  // namespace tumorgnn::pipeline
