#pragma once
#include <cstddef>
#include <utility>
#include <vector>

#include "dsm/rng.hpp"

namespace dsm {

// Geometric variance-exploding schedule: sigma(t) = sigma_min (sigma_max/sigma_min)^t,
// zero drift, g(t)^2 = d sigma(t)^2 / dt.
class NoiseSchedule {
public:
    NoiseSchedule(double sigma_min, double sigma_max);

    double sigma_at(double t) const;           // t in [0,1], else std::domain_error
    double diffusion_coeff_sq(double t) const; // 2 sigma(t)^2 ln(sigma_max/sigma_min)

    // n geometrically spaced levels from sigma_min (level 0) to sigma_max.
    std::vector<double> sigma_levels(std::size_t n) const;

    double sigma_min() const { return sigma_min_; }
    double sigma_max() const { return sigma_max_; }

private:
    double sigma_min_;
    double sigma_max_;
    double log_ratio_;
};

// Forward perturbation x_t = x0 + sigma z. Returns (x_t, z) so the conditional
// score -z/sigma can be formed without cancellation.
std::pair<double, double> perturb(double x0, double sigma, Rng& rng);

}  // namespace dsm
