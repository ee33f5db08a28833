#include "tumorgnn/sim/simulator.hpp"

#include "tumorgnn/sim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tumorgnn::sim {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::division_success: return "division_success";
        case EventKind::division_failure: return "division_failure";
        case EventKind::natural_death: return "natural_death";
    }
    return "unknown";
}

std::vector<std::uint32_t> TumorHistory::alive_at(double t) const {
    std::vector<std::uint32_t> out;
    for (const Cell& c : cells)
        if (c.alive_at(t)) out.push_back(c.id);
    return out;
}

double local_density(const Vec3& pos, std::uint32_t self, const SpatialIndex& index,
                     const KernelParams& density) {
    double rho = 0.0;
    index.for_each_within(pos, density.cutoff, [&](std::uint32_t id, double d2) {
        if (id != self) rho += kernel_rho(std::sqrt(d2), density);
    });
    return rho;
}

double local_density_brute_force(const Vec3& pos, std::size_t self, const std::vector<Vec3>& positions,
                                 const KernelParams& density) {
    double rho = 0.0;
    for (std::size_t j = 0; j < positions.size(); ++j)
        if (j != self) rho += kernel_rho(distance(pos, positions[j]), density);
    return rho;
}

std::pair<Daughter, Daughter> spawn_daughters(const Vec3& parent_pos, const IntrinsicParams& parent,
                                              double p_mut, double mutation_increase,
                                              std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution mutate(p_mut);

    Daughter a{parent_pos, false, parent};
    Daughter b{parent_pos, false, parent};
    for (int axis = 0; axis < 3; ++axis) b.position[axis] += normal(rng);

    for (Daughter* d : {&a, &b}) {
        if (p_mut > 0.0 && mutate(rng)) {
            d->mutated = true;
            d->params = mutate_all(parent, mutation_increase, rng);
        }
    }
    return {a, b};
}

namespace {

struct Clock {
    double time;
    std::uint32_t id;
    std::uint32_t version;
    bool birth;

    // min-heap on (time, id)
    bool operator<(const Clock& o) const {
        if (time != o.time) return time > o.time;
        return id > o.id;
    }
};

class Engine {
public:
    Engine(const GlobalParams& gp, const IntrinsicParams& initial)
        : gp_(gp), rng_(gp.rng_seed), index_(gp.density.cutoff) {
        h_.params = gp;
        h_.initial = initial;
        h_.clones.push_back(CloneRecord{kNoCell, initial, 0.0});
    }

    TumorHistory run(std::size_t n0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i < n0; ++i) {
            Vec3 pos{0.0, 0.0, 0.0};
            if (i > 0)
                for (auto& x : pos) x = normal(rng_);
            add_cell(pos, kRootClone, kNoCell);
        }
        for (std::uint32_t id = 0; id < h_.cells.size(); ++id) schedule(id);
        affected_.clear();

        h_.stop = StopReason::extinction;
        while (!heap_.empty()) {
            Clock top = heap_.top();
            heap_.pop();
            if (!alive_[top.id] || version_[top.id] != top.version) continue;
            if (gp_.max_sim_time && top.time > *gp_.max_sim_time) {
                now_ = *gp_.max_sim_time;
                h_.stop = StopReason::time_limit;
                break;
            }
            now_ = top.time;
            fire(top);
            if (gp_.max_birth_events && h_.birth_count >= *gp_.max_birth_events) {
                h_.stop = StopReason::birth_limit;
                break;
            }
        }
        if (h_.stop == StopReason::extinction && population_ > 0) {
            // Only reachable when every live clock is infinite.
            h_.stop = gp_.max_sim_time ? StopReason::time_limit : StopReason::extinction;
        }
        h_.end_time = now_;
        return std::move(h_);
    }

private:
    std::uint32_t add_cell(const Vec3& pos, std::uint32_t mutation_id, std::uint32_t parent) {
        auto id = static_cast<std::uint32_t>(h_.cells.size());
        if (id == kNoCell) throw std::overflow_error("simulate: cell id space exhausted");
        Cell c;
        c.id = id;
        c.parent_id = parent;
        c.position = pos;
        c.mutation_id = mutation_id;
        c.birth_time = now_;
        h_.cells.push_back(c);

        double rho = 0.0;
        index_.for_each_within(pos, gp_.density.cutoff, [&](std::uint32_t j, double d2) {
            double k = kernel_rho(std::sqrt(d2), gp_.density);
            if (k > 0.0) {
                rho_[j] += k;
                rho += k;
                affected_.push_back(j);
            }
        });
        rho_.push_back(rho);
        alive_.push_back(1);
        version_.push_back(0);
        index_.insert(id, pos);
        ++population_;
        return id;
    }

    void remove_cell(std::uint32_t id) {
        const Vec3 pos = h_.cells[id].position;
        index_.remove(id, pos);
        alive_[id] = 0;
        ++version_[id];
        h_.cells[id].end_time = now_;
        --population_;
        index_.for_each_within(pos, gp_.density.cutoff, [&](std::uint32_t j, double d2) {
            double k = kernel_rho(std::sqrt(d2), gp_.density);
            if (k > 0.0) {
                rho_[j] = std::max(0.0, rho_[j] - k);
                affected_.push_back(j);
            }
        });
    }

    double capped(double r) const { return std::min(r, gp_.max_rate); }

    void schedule(std::uint32_t id) {
        ++version_[id];
        const IntrinsicParams& p = h_.clones[h_.cells[id].mutation_id].params;
        double rho = rho_[id];
        double b = capped(birth_rate(p, rho, gp_.birth));
        double d = capped(death_rate(p, rho, gp_.lifespan));
        double tb = std::numeric_limits<double>::infinity();
        if (b > 0.0) tb = now_ + std::exponential_distribution<double>(b)(rng_);
        double td = std::numeric_limits<double>::infinity();
        if (d > 0.0) td = now_ + std::exponential_distribution<double>(d)(rng_);
        double t = std::min(tb, td);
        if (!std::isfinite(t)) return;
        // Keep event times strictly increasing even for extreme rates.
        if (t <= now_) t = std::nextafter(now_, std::numeric_limits<double>::infinity());
        heap_.push(Clock{t, id, version_[id], tb < td});
    }

    void record(EventKind kind, std::uint32_t id, std::array<std::uint32_t, 2> daughters) {
        EventRecord e;
        e.time = now_;
        e.kind = kind;
        e.cell_id = id;
        e.daughter_ids = daughters;
        e.density_at_event = rho_[id];
        e.position = h_.cells[id].position;
        e.mutation_id = h_.cells[id].mutation_id;
        h_.events.push_back(e);
    }

    void fire(const Clock& clk) {
        const std::uint32_t id = clk.id;
        affected_.clear();
        if (!clk.birth) {
            record(EventKind::natural_death, id, {kNoCell, kNoCell});
            remove_cell(id);
        } else {
            const Cell parent = h_.cells[id];
            const IntrinsicParams pp = h_.clones[parent.mutation_id].params;
            double s = success_probability(pp, rho_[id], gp_.success);
            bool ok = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < s;
            if (!ok) {
                record(EventKind::division_failure, id, {kNoCell, kNoCell});
                remove_cell(id);
            } else {
                auto [a, b] = spawn_daughters(parent.position, pp, gp_.mutation_probability,
                                              gp_.mutation_increase, rng_);
                auto first = static_cast<std::uint32_t>(h_.cells.size());
                record(EventKind::division_success, id, {first, first + 1});
                remove_cell(id);
                std::uint32_t ids[2];
                int k = 0;
                for (const Daughter* d : {&a, &b}) {
                    std::uint32_t mut = parent.mutation_id;
                    if (d->mutated) {
                        mut = static_cast<std::uint32_t>(h_.clones.size());
                        h_.clones.push_back(CloneRecord{parent.mutation_id, d->params, now_});
                    }
                    ids[k++] = add_cell(d->position, mut, id);
                }
                ++h_.birth_count;
                affected_.push_back(ids[0]);
                affected_.push_back(ids[1]);
            }
        }
        std::sort(affected_.begin(), affected_.end());
        affected_.erase(std::unique(affected_.begin(), affected_.end()), affected_.end());
        for (std::uint32_t j : affected_)
            if (alive_[j]) schedule(j);
    }

    const GlobalParams& gp_;
    std::mt19937_64 rng_;
    SpatialIndex index_;
    TumorHistory h_;
    std::vector<double> rho_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::uint32_t> version_;
    std::vector<std::uint32_t> affected_;
    std::priority_queue<Clock> heap_;
    std::size_t population_ = 0;
    double now_ = 0.0;
};

}  // namespace

TumorHistory simulate(const GlobalParams& gp, const IntrinsicParams& initial, std::size_t n0) {
    if (n0 < 1) throw std::invalid_argument("simulate: n0 must be >= 1");
    gp.validate();
    initial.validate();
    if (initial.lifespan_eff <= 0.0) throw std::domain_error("immortal-parameterization rejected");
    Engine engine(gp, initial);
    return engine.run(n0);
}

}  // namespace tumorgnn::sim
