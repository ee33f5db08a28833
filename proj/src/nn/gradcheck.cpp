#include "tumorgnn/nn/gradcheck.hpp"

#include "tumorgnn/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace tumorgnn::nn {

std::vector<TensorGradCheck> gradient_check(ParameterStore& store, const std::function<Var(Tape&)>& loss_fn,
                                            const GradCheckOptions& opt) {
    std::optional<BranchFreeze> freeze;
    if (opt.freeze_branches) freeze.emplace();
    store.zero_grad();
    {
        Tape tape;
        tape.backward(loss_fn(tape));
    }
    auto eval = [&] {
        if (freeze) freeze->replay();
        Tape tape;
        return loss_fn(tape).value().data[0];
    };

    std::mt19937_64 rng(opt.seed);
    std::vector<TensorGradCheck> report;
    for (std::size_t p = 0; p < store.size(); ++p) {
        Parameter& par = store[p];
        std::vector<std::size_t> idx(par.value.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        if (opt.max_entries > 0 && idx.size() > opt.max_entries) {
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(opt.max_entries);
            std::sort(idx.begin(), idx.end());
        }
        TensorGradCheck r;
        r.name = par.name;
        r.entries_checked = idx.size();
        double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
        for (std::size_t i : idx) {
            const double orig = par.value.data[i];
            par.value.data[i] = orig + opt.h;
            const double fp = eval();
            par.value.data[i] = orig - opt.h;
            const double fm = eval();
            par.value.data[i] = orig;
            const double num = (fp - fm) / (2.0 * opt.h);
            const double ana = par.grad.data[i];
            diff2 += (ana - num) * (ana - num);
            a2 += ana * ana;
            n2 += num * num;
        }
        r.analytic_norm = std::sqrt(a2);
        r.numeric_norm = std::sqrt(n2);
        r.relative_error = std::sqrt(diff2) / std::max(r.analytic_norm + r.numeric_norm, opt.floor);
        report.push_back(r);
    }
    return report;
}

double max_relative_error(const std::vector<TensorGradCheck>& report) {
    double m = 0.0;
    for (const auto& r : report) m = std::max(m, r.relative_error);
    return m;
}

}  // namespace tumorgnn::nn
