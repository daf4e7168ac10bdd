#include "dsm/noise_schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace dsm {

NoiseSchedule::NoiseSchedule(double sigma_min, double sigma_max)
    : sigma_min_(sigma_min), sigma_max_(sigma_max), log_ratio_(std::log(sigma_max / sigma_min)) {
    if (!(sigma_min > 0.0) || !(sigma_min < sigma_max))
        throw std::invalid_argument("schedule requires 0 < sigma_min < sigma_max");
}

double NoiseSchedule::sigma_at(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("sigma_at: t must lie in [0,1]");
    if (t == 0.0) return sigma_min_;
    if (t == 1.0) return sigma_max_;
    return sigma_min_ * std::exp(log_ratio_ * t);
}

double NoiseSchedule::diffusion_coeff_sq(double t) const {
    const double s = sigma_at(t);
    return 2.0 * s * s * log_ratio_;
}

std::vector<double> NoiseSchedule::sigma_levels(std::size_t n) const {
    if (n < 2) throw std::invalid_argument("sigma_levels: need at least 2 levels");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sigma_at(static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::pair<double, double> perturb(double x0, double sigma, Rng& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("perturb: sigma must be positive");
    const double z = rng.normal();
    return {x0 + sigma * z, z};
}

}  // namespace dsm
