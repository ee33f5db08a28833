#pragma once

#include "tumorgnn/sim/params.hpp"

#include <random>

namespace tumorgnn::sim {

/// Density weighting kernel; zero at and beyond the cutoff.
double kernel_rho(double w, const KernelParams& k);

/// Probability that an initiated division succeeds at local density `rho`.
double success_probability(const IntrinsicParams& p, double rho, const KernelParams& k);

/// Division rate at local density `rho`.
double birth_rate(const IntrinsicParams& p, double rho, const KernelParams& k);

/// Natural death rate, the inverse of the lifespan. Throws
/// std::domain_error for lifespan_eff == 0 or a zero lifespan scale.
double death_rate(const IntrinsicParams& p, double rho, const KernelParams& k);

/// Draws x ~ U(0, min(x0 + s, 1)).
double mutate_intrinsic(double x0, double s, std::mt19937_64& rng);

/// Resamples all six intrinsics through mutate_intrinsic.
IntrinsicParams mutate_all(const IntrinsicParams& p, double s, std::mt19937_64& rng);

}  // namespace tumorgnn::sim
