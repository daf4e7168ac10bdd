#pragma once
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dsm/noise_schedule.hpp"
#include "dsm/rng.hpp"

namespace dsm {

struct SamplerConfig {
    std::size_t steps = 1000;
    double t_end = 0.0;  // integrate t from 1 down to t_end
    std::size_t n_samples = 5000;
};

// score_fn(x, sigma) -> estimated marginal score; must be pure / thread-safe.
using ScoreFn = std::function<double(double x, double sigma)>;

// Euler-Maruyama integration of the reverse-time SDE
//   x <- x + g^2(t) score(x, sigma(t)) dt + g(t) sqrt(dt) xi
// from x ~ N(0, sigma(1)^2). Each trajectory runs on its own substream
// (keyed by trajectory index), so the output is identical for any thread
// count and equal to the serial variant bit for bit.
std::vector<double> reverse_sde_sample(const ScoreFn& score_fn, const NoiseSchedule& sched,
                                       const SamplerConfig& cfg, Rng rng);
std::vector<double> reverse_sde_sample_serial(const ScoreFn& score_fn, const NoiseSchedule& sched,
                                              const SamplerConfig& cfg, Rng rng);

// Energy distance V-statistic 2 E|a-b| - E|a-a'| - E|b-b'| with the diagonal
// included in the within-sample means. The production version sorts and uses
// prefix sums (O(n log n)); the serial reference is the direct O(n^2) double
// loop and doubles as the test oracle.
double energy_distance(std::span<const double> a, std::span<const double> b);
double energy_distance_serial(std::span<const double> a, std::span<const double> b);

}  // namespace dsm
