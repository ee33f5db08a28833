#include "tumorgnn/sim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tumorgnn::sim {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string("intrinsic parameter out of [0,1]: ") + name);
}

// (1/shape) * (ratio)^shape where ratio = rho / (resistance * width).
// A zero resistance means infinite sensitivity: any positive density saturates.
double scaled_exponent(double rho, double resistance, const KernelParams& k) {
    if (rho <= 0.0) return 0.0;
    double denom = resistance * k.width;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(rho / denom, k.shape) / k.shape;
}

}  // namespace

void IntrinsicParams::validate() const {
    check_unit(birth_eff, "birth_eff");
    check_unit(birth_res, "birth_res");
    check_unit(success_eff, "success_eff");
    check_unit(success_res, "success_res");
    check_unit(lifespan_eff, "lifespan_eff");
    check_unit(lifespan_res, "lifespan_res");
}

void KernelParams::validate() const {
    if (!(scale > 0.0) || !(width > 0.0) || !(shape > 0.0) || !(cutoff >= 0.0))
        throw std::invalid_argument("kernel parameters must be positive");
}

void GlobalParams::validate() const {
    if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0))
        throw std::invalid_argument("mutation_probability must lie in [0,1]");
    if (!(mutation_increase >= 0.0)) throw std::invalid_argument("mutation_increase must be >= 0");
    density.validate();
    if (!(density.cutoff > 0.0)) throw std::invalid_argument("density cutoff must be > 0");
    birth.validate();
    success.validate();
    lifespan.validate();
    if (!max_birth_events && !max_sim_time)
        throw std::invalid_argument("at least one of max_birth_events / max_sim_time must be set");
    if (!(max_rate > 0.0)) throw std::invalid_argument("max_rate must be > 0");
}

double kernel_rho(double w, const KernelParams& k) {
    if (w >= k.cutoff) return 0.0;
    return k.scale * std::exp(-std::pow(w / k.width, k.shape) / k.shape);
}

double success_probability(const IntrinsicParams& p, double rho, const KernelParams& k) {
    double e = scaled_exponent(rho, p.success_res, k);
    return std::clamp(p.success_eff * std::exp(-e), 0.0, 1.0);
}

double birth_rate(const IntrinsicParams& p, double rho, const KernelParams& k) {
    double e = scaled_exponent(rho, p.birth_res, k);
    return p.birth_eff * k.scale * std::exp(-e);
}

double death_rate(const IntrinsicParams& p, double rho, const KernelParams& k) {
    if (p.lifespan_eff <= 0.0) throw std::domain_error("immortal-parameterization rejected");
    double e = scaled_exponent(rho, p.lifespan_res, k);
    // 1 / (s_l * l * exp(-e)) written to avoid the 0 * inf corner.
    return std::exp(e) / (k.scale * p.lifespan_eff);
}

double mutate_intrinsic(double x0, double s, std::mt19937_64& rng) {
    double upper = std::min(x0 + s, 1.0);
    if (upper <= 0.0) return 0.0;
    std::uniform_real_distribution<double> dist(0.0, upper);
    double x = dist(rng);
    while (x <= 0.0) x = dist(rng);  // open interval
    return x;
}

IntrinsicParams mutate_all(const IntrinsicParams& p, double s, std::mt19937_64& rng) {
    IntrinsicParams out;
    out.birth_eff = mutate_intrinsic(p.birth_eff, s, rng);
    out.birth_res = mutate_intrinsic(p.birth_res, s, rng);
    out.success_eff = mutate_intrinsic(p.success_eff, s, rng);
    out.success_res = mutate_intrinsic(p.success_res, s, rng);
    out.lifespan_eff = mutate_intrinsic(p.lifespan_eff, s, rng);
    out.lifespan_res = mutate_intrinsic(p.lifespan_res, s, rng);
    return out;
}

}  // namespace tumorgnn::sim
