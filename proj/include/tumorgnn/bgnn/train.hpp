#pragma once

#include "tumorgnn/bgnn/model.hpp"
#include "tumorgnn/nn/gradcheck.hpp"
#include "tumorgnn/nn/optim.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace tumorgnn::bgnn {

struct TrainConfig {
    int epochs = 200;
    double base_lr = 1e-3;
    double decay_factor = 0.5;
    int decay_period = 33;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    /// Also score the training split in eval mode after every epoch.
    bool eval_train_accuracy = true;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct EpochMetrics {
    int epoch = 0;
    double lr = 0.0;
    double loss = 0.0;            // mean training loss over the epoch
    double train_acc = 0.0;       // training-mode predictions (dropout active)
    double train_acc_eval = 0.0;  // eval-mode pass over the training split, NaN if disabled
    double val_acc = 0.0;
};

struct TrainResult {
    std::vector<EpochMetrics> history;
    int best_epoch = -1;
    double best_val_acc = -1.0;
    std::vector<nn::Matrix> best_params;
    std::vector<nn::Matrix> final_params;
    nn::AdamState adam;
};

/// Adam with a step schedule, one update per mini-batch. On return the
/// model holds the parameters of the epoch with the best validation
/// accuracy (earliest on ties).
TrainResult train(Model& model, const std::vector<LabeledGraph>& train_set, const std::vector<LabeledGraph>& val_set,
                  const TrainConfig& tc, const std::function<void(const EpochMetrics&)>& on_epoch = {});

/// Eval-mode argmax predictions (ties go to class 0).
std::vector<int> predict(const Model& model, const std::vector<LabeledGraph>& graphs, std::size_t batch_size = 32);
/// Percentage of graphs whose argmax prediction equals the label.
double accuracy(const std::vector<int>& predicted, const std::vector<LabeledGraph>& graphs);
double evaluate(const Model& model, const std::vector<LabeledGraph>& graphs, std::size_t batch_size = 32);

void write_metrics_csv(std::ostream& os, const std::vector<EpochMetrics>& history);

struct AblationRow {
    std::vector<std::size_t> mask;
    double train_acc = 0.0;
    double val_acc = 0.0;
    double test_acc = 0.0;
};

/// One full train/evaluate run per mask, each with the same seeds and splits.
std::vector<AblationRow> ablate(const ModelConfig& base, const std::vector<std::vector<std::size_t>>& masks,
                                const std::vector<LabeledGraph>& train_set, const std::vector<LabeledGraph>& val_set,
                                const std::vector<LabeledGraph>& test_set, const TrainConfig& tc);

/// Central-difference check of every parameter tensor of `model` on one
/// eval-mode batch.
std::vector<nn::TensorGradCheck> gradient_check(Model& model, const std::vector<LabeledGraph>& graphs, double h = 1e-5,
                                                std::size_t max_entries = 0, std::uint64_t seed = 0);

}  // namespace tumorgnn::bgnn
