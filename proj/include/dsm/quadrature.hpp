#pragma once
#include <cstddef>
#include <functional>

#include "dsm/gaussian_mixture.hpp"

namespace dsm {

// Fixed composite-Simpson grid. Default construction from a mixture spans
// [min mean - 10 max std, max mean + 10 max std] with 20,001 points.
struct QuadratureSpec {
    double x_min;
    double x_max;
    std::size_t points;  // must be odd and >= 3

    static QuadratureSpec for_mixture(const GaussianMixture1D& g, std::size_t points = 20001);
};

struct FisherResult {
    double value;
    double tail_mass;  // mixture mass outside the grid
    bool grid_ok;      // tail_mass <= 1e-10
};

// Composite Simpson of f over the spec grid; deterministic chunked reduction.
double simpson_integrate(const std::function<double(double)>& f, const QuadratureSpec& spec);
double simpson_integrate_serial(const std::function<double(double)>& f, const QuadratureSpec& spec);

// Fisher information E[s(x)^2] of the mixture by quadrature.
FisherResult fisher_information(const GaussianMixture1D& g, const QuadratureSpec& spec);
inline FisherResult fisher_information(const GaussianMixture1D& g) {
    return fisher_information(g, QuadratureSpec::for_mixture(g));
}

}  // namespace dsm
