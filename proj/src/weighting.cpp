#include "dsm/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsm/errors.hpp"
#include "dsm/quadrature.hpp"

namespace dsm {

double heuristic_weight(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("heuristic_weight: sigma must be positive");
    return sigma * sigma;
}

double optimal_pointwise_weight(double sigma, double hessian_at_xt, bool* clamped) {
    if (!(sigma > 0.0)) throw std::invalid_argument("optimal_pointwise_weight: sigma must be positive");
    // inverse pointwise conditional variance; positive in exact arithmetic
    double denom = 1.0 / (sigma * sigma) + hessian_at_xt;
    if (clamped) *clamped = false;
    if (denom <= 0.0) {
        denom = 1e-12;
        if (clamped) *clamped = true;
    }
    return 1.0 / denom;
}

double optimal_expected_weight(double sigma, double fisher) {
    if (!(sigma > 0.0)) throw std::invalid_argument("optimal_expected_weight: sigma must be positive");
    const double q = sigma * sigma * fisher;
    if (q >= 1.0)
        throw NumericError("optimal_expected_weight: q = sigma^2 I = " + std::to_string(q) +
                           " >= 1 violates the positivity of the conditional variance");
    return sigma * sigma / (1.0 - q);
}

double taylor_weight(double sigma, double fisher, int order) {
    if (!(sigma > 0.0)) throw std::invalid_argument("taylor_weight: sigma must be positive");
    if (order != 1 && order != 2) throw std::invalid_argument("taylor_weight: order must be 1 or 2");
    const double s2 = sigma * sigma;
    return order == 1 ? s2 : s2 + s2 * s2 * fisher;
}

double stam_upper_bound(double sigma, double fisher0) {
    if (!(sigma > 0.0)) throw std::invalid_argument("stam_upper_bound: sigma must be positive");
    const double s2 = sigma * sigma;
    return s2 + fisher0 * s2 * s2;
}

const char* weighting_name(WeightingKind kind) {
    switch (kind) {
        case WeightingKind::None: return "none";
        case WeightingKind::Heuristic: return "heuristic";
        case WeightingKind::OptimalPointwise: return "optimal";
        case WeightingKind::OptimalExpected: return "optimal-expected";
        case WeightingKind::TaylorK1: return "taylor";
    }
    return "?";
}

WeightingKind parse_weighting(const std::string& name) {
    if (name == "none") return WeightingKind::None;
    if (name == "heuristic") return WeightingKind::Heuristic;
    if (name == "optimal" || name == "optimal-pointwise") return WeightingKind::OptimalPointwise;
    if (name == "optimal-expected") return WeightingKind::OptimalExpected;
    if (name == "taylor" || name == "taylor-k1") return WeightingKind::TaylorK1;
    throw ConfigError("unknown weighting '" + name +
                      "' (expected none|heuristic|optimal|optimal-expected|taylor)");
}

WeightingScheme WeightingScheme::none() { return WeightingScheme(WeightingKind::None); }

WeightingScheme WeightingScheme::heuristic() { return WeightingScheme(WeightingKind::Heuristic); }

WeightingScheme WeightingScheme::optimal_pointwise(GaussianMixture1D data) {
    WeightingScheme w(WeightingKind::OptimalPointwise);
    w.data_ = std::make_shared<const GaussianMixture1D>(std::move(data));
    return w;
}

namespace {
constexpr std::size_t kFisherCacheNodes = 129;

// cache log(fisher) against log(sigma): in both tails the relation is affine
// (slope 0 for sigma -> 0, slope -2 for sigma -> inf), so linear interpolation
// in log-log coordinates stays accurate through the transition
void build_fisher_cache(const GaussianMixture1D& data, const NoiseSchedule& sched,
                        std::vector<double>& log_sigma, std::vector<double>& log_fisher) {
    log_sigma.resize(kFisherCacheNodes);
    log_fisher.resize(kFisherCacheNodes);
    for (std::size_t i = 0; i < kFisherCacheNodes; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(kFisherCacheNodes - 1);
        const double s = sched.sigma_at(t);
        log_sigma[i] = std::log(s);
        log_fisher[i] = std::log(fisher_information(data.perturbed(s)).value);
    }
}
}  // namespace

WeightingScheme WeightingScheme::optimal_expected(GaussianMixture1D data, const NoiseSchedule& sched) {
    WeightingScheme w(WeightingKind::OptimalExpected);
    w.data_ = std::make_shared<const GaussianMixture1D>(std::move(data));
    build_fisher_cache(*w.data_, sched, w.cache_log_sigma_, w.cache_log_fisher_);
    return w;
}

WeightingScheme WeightingScheme::taylor_k1(GaussianMixture1D data, const NoiseSchedule& sched) {
    WeightingScheme w(WeightingKind::TaylorK1);
    w.data_ = std::make_shared<const GaussianMixture1D>(std::move(data));
    build_fisher_cache(*w.data_, sched, w.cache_log_sigma_, w.cache_log_fisher_);
    return w;
}

WeightingScheme WeightingScheme::make(WeightingKind kind, const GaussianMixture1D& data,
                                      const NoiseSchedule& sched) {
    switch (kind) {
        case WeightingKind::None: return none();
        case WeightingKind::Heuristic: return heuristic();
        case WeightingKind::OptimalPointwise: return optimal_pointwise(data);
        case WeightingKind::OptimalExpected: return optimal_expected(data, sched);
        case WeightingKind::TaylorK1: return taylor_k1(data, sched);
    }
    throw std::invalid_argument("WeightingScheme::make: unknown kind");
}

double WeightingScheme::fisher_at(double sigma) const {
    const double ls = std::log(sigma);
    const auto& xs = cache_log_sigma_;
    if (ls <= xs.front()) return std::exp(cache_log_fisher_.front());
    if (ls >= xs.back()) return std::exp(cache_log_fisher_.back());
    const auto it = std::upper_bound(xs.begin(), xs.end(), ls);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const double t = (ls - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return std::exp(cache_log_fisher_[hi - 1] * (1.0 - t) + cache_log_fisher_[hi] * t);
}

double WeightingScheme::operator()(double sigma, double x_t) const {
    switch (kind_) {
        case WeightingKind::None:
            return 1.0;
        case WeightingKind::Heuristic:
            return heuristic_weight(sigma);
        case WeightingKind::OptimalPointwise: {
            double score, hess;
            data_->perturbed_score_and_hessian(x_t, sigma, score, hess);
            return optimal_pointwise_weight(sigma, hess);
        }
        case WeightingKind::OptimalExpected:
            return optimal_expected_weight(sigma, fisher_at(sigma));
        case WeightingKind::TaylorK1:
            return taylor_weight(sigma, fisher_at(sigma), 2);
    }
    return 1.0;
}

}  // namespace dsm
