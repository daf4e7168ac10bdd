#include "dsm/training.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "dsm/errors.hpp"
#include "dsm/parallel.hpp"
#include "dsm/quadrature.hpp"

namespace dsm {

std::vector<double> moving_average5(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = i + 2 < n ? i + 2 : n - 1;
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += xs[j];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<TrainSample> dsm_batch(const TrainConfig& cfg, std::optional<double> fixed_sigma,
                                   Rng& rng) {
    if (cfg.batch_size < 1) throw std::invalid_argument("dsm_batch: batch_size must be >= 1");
    std::vector<TrainSample> batch(static_cast<std::size_t>(cfg.batch_size));
    for (auto& s : batch) {
        const double x0 = cfg.data.sample_one(rng);
        const double sigma = fixed_sigma ? *fixed_sigma : cfg.schedule.sigma_at(rng.uniform01());
        const auto [x_t, z] = perturb(x0, sigma, rng);
        s.x = x_t;
        s.sigma = sigma;
        s.target = -z / sigma;
        s.weight = cfg.weighting(sigma, x_t);
    }
    return batch;
}

ScoreFn model_score_fn(const MlpParams& params) {
    auto owned = std::make_shared<const MlpParams>(params);
    return [owned](double x, double sigma) {
        thread_local MlpWorkspace ws;
        return mlp_forward(*owned, x, sigma, ws);
    };
}

ScoreFn analytic_score_fn(const GaussianMixture1D& data) {
    auto owned = std::make_shared<const GaussianMixture1D>(data);
    return [owned](double x, double sigma) { return owned->perturbed_score(x, sigma); };
}

namespace {

struct EvalResult {
    double model_ed;
    double gen_ed;
};

EvalResult evaluate(const TrainConfig& cfg, const MlpParams& params, Rng eval_rng) {
    SamplerConfig sc{cfg.sde_steps, 0.0, cfg.eval_samples};
    const auto model_samples = reverse_sde_sample(model_score_fn(params), cfg.schedule, sc,
                                                  eval_rng.split(1));
    const auto gen_samples = reverse_sde_sample(analytic_score_fn(cfg.data), cfg.schedule, sc,
                                                eval_rng.split(2));
    Rng data_rng = eval_rng.split(3);
    const auto data_samples = cfg.data.sample(cfg.eval_samples, data_rng);
    return EvalResult{energy_distance(model_samples, data_samples),
                      energy_distance(gen_samples, data_samples)};
}

}  // namespace

TrainResult train(const TrainConfig& cfg) {
    if (cfg.iterations < 1) throw std::invalid_argument("train: iterations must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
    if (cfg.eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");

    Rng root(cfg.seed);
    Rng batch_rng = root.split(0x10);
    MlpParams params = mlp_init(cfg.layout, mix_seed(cfg.seed, 0x1717));

    const std::size_t np = params.values.size();
    std::vector<double> m(np, 0.0), v(np, 0.0);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    TrainResult result{std::move(params), {}};
    double last_loss = 0.0;
    for (long it = 0; it <= cfg.iterations; ++it) {
        if (it % cfg.eval_every == 0 || it == cfg.iterations) {
            const EvalResult ev = evaluate(cfg, result.params, root.split(0x2000 + static_cast<std::uint64_t>(it)));
            result.log.records.push_back(RunRecord{it, last_loss, ev.model_ed, ev.gen_ed});
        }
        if (it == cfg.iterations) break;

        const auto batch = dsm_batch(cfg, std::nullopt, batch_rng);
        LossGrad lg = mlp_loss_and_grad(result.params, batch);
        if (!std::isfinite(lg.loss))
            throw NumericError("train: loss diverged at iteration " + std::to_string(it));
        last_loss = lg.loss;

        const double t = static_cast<double>(it + 1);
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        for (std::size_t j = 0; j < np; ++j) {
            m[j] = beta1 * m[j] + (1.0 - beta1) * lg.grad[j];
            v[j] = beta2 * v[j] + (1.0 - beta2) * lg.grad[j] * lg.grad[j];
            result.params.values[j] -= cfg.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps);
        }
    }

    std::vector<double> model_ed, gen_ed;
    for (const auto& r : result.log.records) {
        model_ed.push_back(r.model_sample_ed);
        gen_ed.push_back(r.gen_sample_ed);
    }
    result.log.model_smoothed = moving_average5(model_ed);
    result.log.gen_smoothed = moving_average5(gen_ed);
    return result;
}

GradVarReport gradient_variance(const TrainConfig& cfg, const MlpParams& params,
                                std::span<const double> sigma_levels, std::size_t batches,
                                std::span<const std::uint64_t> seeds) {
    if (batches < 2) throw std::invalid_argument("gradient_variance: need at least 2 batches");
    if (seeds.empty()) throw std::invalid_argument("gradient_variance: need at least one seed");

    GradVarReport report;
    report.cells.reserve(sigma_levels.size() * seeds.size());
    const std::size_t np = params.values.size();

    for (std::size_t lvl = 0; lvl < sigma_levels.size(); ++lvl) {
        const double sigma = sigma_levels[lvl];
        std::vector<double> traces(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long long si = 0; si < static_cast<long long>(seeds.size()); ++si) {
            Rng rng(mix_seed(seeds[static_cast<std::size_t>(si)], lvl));
            std::vector<std::vector<double>> grads(batches);
            for (std::size_t b = 0; b < batches; ++b) {
                const auto batch = dsm_batch(cfg, sigma, rng);
                grads[b] = mlp_loss_and_grad(params, batch).grad;
            }
            // trace of sample covariance = (1/(B-1)) sum_b ||g_b - mean||^2
            std::vector<double> mean(np, 0.0);
            for (const auto& g : grads)
                for (std::size_t j = 0; j < np; ++j) mean[j] += g[j];
            for (double& x : mean) x /= static_cast<double>(batches);
            double trace = 0.0;
            for (const auto& g : grads)
                for (std::size_t j = 0; j < np; ++j) {
                    const double d = g[j] - mean[j];
                    trace += d * d;
                }
            traces[static_cast<std::size_t>(si)] = trace / static_cast<double>(batches - 1);
        }
        double mean = 0.0;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            report.cells.push_back(GradVarCell{static_cast<int>(lvl), sigma, seeds[si], traces[si]});
            mean += traces[si];
        }
        mean /= static_cast<double>(seeds.size());
        double se = 0.0;
        if (seeds.size() > 1) {
            for (double tr : traces) se += (tr - mean) * (tr - mean);
            se = std::sqrt(se / static_cast<double>(seeds.size() - 1) /
                           static_cast<double>(seeds.size()));
        }
        report.sigma.push_back(sigma);
        report.trace_mean.push_back(mean);
        report.trace_se.push_back(se);
    }
    return report;
}

GapResult pythagorean_gap(const GaussianMixture1D& data, double sigma,
                          const std::function<double(double)>& score_fn, std::size_t n, Rng rng) {
    if (n < 1000) throw std::invalid_argument("pythagorean_gap: n must be >= 1000");
    if (!(sigma > 0.0)) throw std::invalid_argument("pythagorean_gap: sigma must be positive");

    double sum_dsm = 0.0, sum_sm = 0.0;
    chunked_sum2(
        n, 8192,
        [&](std::size_t lo, std::size_t hi, double& acc_dsm, double& acc_sm) {
            Rng block = rng.split(lo / 8192);
            double d = 0.0, s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const double x0 = data.sample_one(block);
                const double z = block.normal();
                const double x_t = x0 + sigma * z;
                const double cond = -z / sigma;
                const double marg = data.perturbed_score(x_t, sigma);
                const double f = score_fn(x_t);
                d += (f - cond) * (f - cond);
                s += (f - marg) * (f - marg);
            }
            acc_dsm = d;
            acc_sm = s;
        },
        sum_dsm, sum_sm);

    const double l_dsm = sum_dsm / static_cast<double>(n);
    const double l_sm = sum_sm / static_cast<double>(n);
    const double fisher = fisher_information(data.perturbed(sigma)).value;
    return GapResult{l_dsm, l_sm, l_dsm - l_sm, 1.0 / (sigma * sigma) - fisher};
}

}  // namespace dsm
