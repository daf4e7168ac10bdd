#pragma once
#include <memory>
#include <string>
#include <vector>

#include "dsm/gaussian_mixture.hpp"
#include "dsm/noise_schedule.hpp"

namespace dsm {

// The loss applies a scalar weight to the squared residual. The residual-space
// weight is the inverse square root of the conditional kernel-score variance,
// so the scalar used here is its square: the inverse conditional variance
// itself. Pointwise that variance is sigma^-2 + H(x_t) with H the Hessian of
// the perturbed log density; in expectation over x_t it is sigma^-2 - I(sigma).

double heuristic_weight(double sigma);                 // sigma^2
double optimal_pointwise_weight(double sigma, double hessian_at_xt, bool* clamped = nullptr);
double optimal_expected_weight(double sigma, double fisher);  // throws NumericError if q >= 1
double taylor_weight(double sigma, double fisher, int order); // 1: sigma^2, 2: sigma^2 + sigma^4 I
double stam_upper_bound(double sigma, double fisher0);        // sigma^2 + I0 sigma^4

enum class WeightingKind { None, Heuristic, OptimalPointwise, OptimalExpected, TaylorK1 };

const char* weighting_name(WeightingKind kind);
WeightingKind parse_weighting(const std::string& name);  // throws ConfigError

// A weighting bound to its density context, callable per (sigma, x_t).
// Expected/Taylor variants cache Fisher information of the perturbed data on
// a geometric sigma grid at construction and interpolate linearly in log
// sigma; the callable itself is pure and thread-safe.
class WeightingScheme {
public:
    static WeightingScheme none();
    static WeightingScheme heuristic();
    static WeightingScheme optimal_pointwise(GaussianMixture1D data);
    static WeightingScheme optimal_expected(GaussianMixture1D data, const NoiseSchedule& sched);
    static WeightingScheme taylor_k1(GaussianMixture1D data, const NoiseSchedule& sched);
    static WeightingScheme make(WeightingKind kind, const GaussianMixture1D& data,
                                const NoiseSchedule& sched);

    double operator()(double sigma, double x_t) const;
    WeightingKind kind() const { return kind_; }

private:
    WeightingScheme(WeightingKind kind) : kind_(kind) {}

    double fisher_at(double sigma) const;

    WeightingKind kind_;
    std::shared_ptr<const GaussianMixture1D> data_;
    std::vector<double> cache_log_sigma_;
    std::vector<double> cache_log_fisher_;
};

}  // namespace dsm
