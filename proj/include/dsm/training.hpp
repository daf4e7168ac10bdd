#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dsm/gaussian_mixture.hpp"
#include "dsm/noise_schedule.hpp"
#include "dsm/rng.hpp"
#include "dsm/sampling.hpp"
#include "dsm/score_net.hpp"
#include "dsm/weighting.hpp"

namespace dsm {

struct TrainConfig {
    GaussianMixture1D data;
    NoiseSchedule schedule{0.01, 50.0};
    WeightingScheme weighting{WeightingScheme::heuristic()};
    MlpLayout layout{{6}};
    int batch_size = 128;
    long iterations = 80000;
    double learning_rate = 1e-3;
    long eval_every = 2000;
    std::size_t eval_samples = 5000;
    std::size_t sde_steps = 1000;
    std::uint64_t seed = 0;
};

struct RunRecord {
    long iteration;
    double train_loss;       // loss of the most recent batch (0 at iteration 0)
    double model_sample_ed;  // ED(model reverse-SDE samples, fresh data samples)
    double gen_sample_ed;    // ED(analytic-score reverse-SDE samples, same data samples)
};

struct RunLog {
    std::vector<RunRecord> records;
    std::vector<double> model_smoothed;  // centered moving average, window 5
    std::vector<double> gen_smoothed;
};

struct TrainResult {
    MlpParams params;
    RunLog log;
};

// Centered moving average with window 5, truncated at the boundaries.
std::vector<double> moving_average5(std::span<const double> xs);

// One DSM minibatch: x0 ~ data, x_t = x0 + sigma z, target -z/sigma, weight
// from the configured scheme. With fixed_sigma the whole batch shares one
// noise level, otherwise t ~ U[0,1] per sample.
std::vector<TrainSample> dsm_batch(const TrainConfig& cfg, std::optional<double> fixed_sigma,
                                   Rng& rng);

// Adam(0.9, 0.999, 1e-8) over the weighted DSM loss; evaluates energy
// distances every eval_every iterations (and at iteration 0). Deterministic
// in (config, seed). Throws NumericError with the iteration index if the
// loss turns non-finite.
TrainResult train(const TrainConfig& cfg);

struct GradVarCell {
    int level;
    double sigma;
    std::uint64_t seed;
    double trace;  // trace of the across-batch sample covariance of gradients
};

struct GradVarReport {
    std::vector<GradVarCell> cells;
    std::vector<double> sigma;       // per level
    std::vector<double> trace_mean;  // across seeds
    std::vector<double> trace_se;    // standard error across seeds
};

// Gradient-variance protocol: at fixed params, for each sigma level and seed
// draw `batches` minibatches (one sigma per batch), compute each batch's
// weighted gradient vector and report the trace of their sample covariance.
GradVarReport gradient_variance(const TrainConfig& cfg, const MlpParams& params,
                                std::span<const double> sigma_levels, std::size_t batches,
                                std::span<const std::uint64_t> seeds);

struct GapResult {
    double l_dsm;
    double l_sm;
    double gap;                // l_dsm - l_sm
    double analytic_constant;  // 1/sigma^2 - I(sigma), by quadrature
};

// Monte-Carlo estimate of the first-order DSM and SM losses for a given score
// function, sharing draws between the two losses.
GapResult pythagorean_gap(const GaussianMixture1D& data, double sigma,
                          const std::function<double(double)>& score_fn, std::size_t n, Rng rng);

// Adapters for reverse_sde_sample.
ScoreFn model_score_fn(const MlpParams& params);
ScoreFn analytic_score_fn(const GaussianMixture1D& data);

}  // namespace dsm
