#include "tumorgnn/bgnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace tumorgnn::bgnn {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (!(base_lr > 0.0)) throw std::invalid_argument("TrainConfig: base_lr must be > 0");
    if (!(decay_factor > 0.0)) throw std::invalid_argument("TrainConfig: decay_factor must be > 0");
    if (decay_period < 1) throw std::invalid_argument("TrainConfig: decay_period must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

namespace {

int argmax_row(const nn::Matrix& logits, std::size_t i) { return logits(i, 1) > logits(i, 0) ? 1 : 0; }

}  // namespace

std::vector<int> predict(const Model& model, const std::vector<LabeledGraph>& graphs, std::size_t batch_size) {
    std::vector<int> out;
    out.reserve(graphs.size());
    for (std::size_t lo = 0; lo < graphs.size(); lo += batch_size) {
        std::vector<const LabeledGraph*> chunk;
        for (std::size_t i = lo; i < std::min(graphs.size(), lo + batch_size); ++i) chunk.push_back(&graphs[i]);
        nn::Matrix L = model.logits(make_batch(chunk));
        for (std::size_t i = 0; i < L.rows; ++i) out.push_back(argmax_row(L, i));
    }
    return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<LabeledGraph>& graphs) {
    if (predicted.size() != graphs.size()) throw std::invalid_argument("accuracy: size mismatch");
    if (graphs.empty()) throw std::invalid_argument("accuracy: empty split");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) hit += predicted[i] == graphs[i].label;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(graphs.size());
}

double evaluate(const Model& model, const std::vector<LabeledGraph>& graphs, std::size_t batch_size) {
    return accuracy(predict(model, graphs, batch_size), graphs);
}

TrainResult train(Model& model, const std::vector<LabeledGraph>& train_set, const std::vector<LabeledGraph>& val_set,
                  const TrainConfig& tc, const std::function<void(const EpochMetrics&)>& on_epoch) {
    tc.validate();
    if (train_set.empty()) throw std::invalid_argument("train: empty training split");
    if (val_set.empty()) throw std::invalid_argument("train: empty validation split");

    nn::ParameterStore& ps = model.params();
    std::mt19937_64 shuffle_rng(tc.seed);
    std::mt19937_64 dropout_rng(tc.seed ^ 0x9e3779b97f4a7c15ull);
    TrainResult res;
    res.adam.init(ps);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const double lr = nn::lr_schedule(epoch, tc.base_lr, tc.decay_factor, tc.decay_period);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t lo = 0; lo < order.size(); lo += tc.batch_size) {
            std::vector<const LabeledGraph*> chunk;
            for (std::size_t i = lo; i < std::min(order.size(), lo + tc.batch_size); ++i)
                chunk.push_back(&train_set[order[i]]);
            nn::GraphBatch batch = make_batch(chunk);
            nn::Tape tape;
            nn::Var logits = model.forward(tape, batch, true, dropout_rng);
            nn::Var loss = nn::cross_entropy(logits, batch.labels);
            for (std::size_t i = 0; i < chunk.size(); ++i) hits += argmax_row(logits.value(), i) == batch.labels[i];
            loss_sum += loss.value().data[0] * static_cast<double>(chunk.size());
            ps.zero_grad();
            tape.backward(loss);
            nn::adam_step(ps, res.adam, lr);
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.lr = lr;
        m.loss = loss_sum / static_cast<double>(train_set.size());
        m.train_acc = 100.0 * static_cast<double>(hits) / static_cast<double>(train_set.size());
        m.train_acc_eval = tc.eval_train_accuracy ? evaluate(model, train_set, tc.batch_size)
                                                  : std::numeric_limits<double>::quiet_NaN();
        m.val_acc = evaluate(model, val_set, tc.batch_size);
        res.history.push_back(m);
        if (m.val_acc > res.best_val_acc) {
            res.best_val_acc = m.val_acc;
            res.best_epoch = epoch;
            res.best_params = ps.snapshot();
        }
        if (on_epoch) on_epoch(m);
    }
    res.final_params = ps.snapshot();
    ps.restore(res.best_params);
    return res;
}

void write_metrics_csv(std::ostream& os, const std::vector<EpochMetrics>& history) {
    os << "epoch,lr,loss,train_acc,train_acc_eval,val_acc\n";
    os << std::setprecision(17);
    for (const auto& m : history)
        os << m.epoch << ',' << m.lr << ',' << m.loss << ',' << m.train_acc << ',' << m.train_acc_eval << ','
           << m.val_acc << '\n';
}

std::vector<AblationRow> ablate(const ModelConfig& base, const std::vector<std::vector<std::size_t>>& masks,
                                const std::vector<LabeledGraph>& train_set, const std::vector<LabeledGraph>& val_set,
                                const std::vector<LabeledGraph>& test_set, const TrainConfig& tc) {
    std::vector<AblationRow> rows;
    for (const auto& mask : masks) {
        ModelConfig cfg = base;
        cfg.feature_mask = mask;
        Model model(cfg);
        TrainResult r = train(model, train_set, val_set, tc);
        AblationRow row;
        row.mask = mask;
        row.train_acc = evaluate(model, train_set, tc.batch_size);
        row.val_acc = r.best_val_acc;
        row.test_acc = evaluate(model, test_set, tc.batch_size);
        rows.push_back(row);
    }
    return rows;
}

std::vector<nn::TensorGradCheck> gradient_check(Model& model, const std::vector<LabeledGraph>& graphs, double h,
                                                std::size_t max_entries, std::uint64_t seed) {
    nn::GraphBatch batch = make_batch(graphs);
    std::mt19937_64 unused(0);
    auto loss = [&](nn::Tape& t) { return nn::cross_entropy(model.forward(t, batch, false, unused), batch.labels); };
    nn::GradCheckOptions opt;
    opt.h = h;
    opt.max_entries = max_entries;
    opt.seed = seed;
    return nn::gradient_check(model.params(), loss, opt);
}

}  // namespace tumorgnn::bgnn
