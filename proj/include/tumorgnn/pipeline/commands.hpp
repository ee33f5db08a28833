#pragma once

#include "tumorgnn/pipeline/config.hpp"
#include "tumorgnn/pipeline/dataset.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace tumorgnn::pipeline {

namespace fs = std::filesystem;

/// Simulates every dataset tumor into `out_dir`/tumor_NNN.trace and writes
/// manifest.json. Refuses to overwrite existing outputs unless `force`.
nlohmann::json cmd_simulate(const PipelineConfig& cfg, const fs::path& out_dir, bool force);

/// Reads the traces listed in `traces_dir`/manifest.json and writes
/// train/val/test.jsonl plus stats.json to `out_dir`.
nlohmann::json cmd_dataset(const PipelineConfig& cfg, const fs::path& traces_dir, const fs::path& out_dir, bool force);

std::vector<PatchRecord> load_split(const fs::path& dataset_dir, Split s);
std::vector<bgnn::LabeledGraph> load_labeled_split(const fs::path& dataset_dir, Split s);

/// Trains the configured model; writes metrics.csv, checkpoint.bin (best
/// validation epoch), final_checkpoint.bin and report.json.
nlohmann::json cmd_train(const PipelineConfig& cfg, const fs::path& dataset_dir, const fs::path& out_dir, bool force);

/// Scores a saved checkpoint on every split of a dataset.
nlohmann::json cmd_eval(const fs::path& checkpoint, const fs::path& dataset_dir);

/// One training run per configured feature mask; writes ablation.csv and
/// ablation.json.
nlohmann::json cmd_ablate(const PipelineConfig& cfg, const fs::path& dataset_dir, const fs::path& out_dir, bool force);

/// Simulates the mutation-probability sweep, labels every accepted patch
/// and reports the fraction of high-heterogeneity patches per level with its
/// rank correlation against the mutation probability.
nlohmann::json cmd_sweep_report(const PipelineConfig& cfg, const fs::path& out_dir, bool force);

/// Rank correlation and per-level rows from explicit (p_mut, fraction) pairs.
nlohmann::json trend_table(const std::vector<double>& p_mut, const std::vector<double>& high_fraction);

}  // namespace tumorgnn::pipeline
