#include "dsm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "dsm/parallel.hpp"

namespace dsm {

QuadratureSpec QuadratureSpec::for_mixture(const GaussianMixture1D& g, std::size_t points) {
    const double pad = 10.0 * g.max_std();
    return QuadratureSpec{g.min_mean() - pad, g.max_mean() + pad, points};
}

namespace {
void check_spec(const QuadratureSpec& spec) {
    if (spec.points < 3 || spec.points % 2 == 0)
        throw std::invalid_argument("quadrature: points must be odd and >= 3");
    if (!(spec.x_max > spec.x_min)) throw std::invalid_argument("quadrature: x_max must exceed x_min");
}

double simpson_weight(std::size_t i, std::size_t n) {
    if (i == 0 || i == n - 1) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
}
}  // namespace

double simpson_integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    check_spec(spec);
    const std::size_t n = spec.points;
    const double h = (spec.x_max - spec.x_min) / static_cast<double>(n - 1);
    const double sum = chunked_sum(n, 1024, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            acc += simpson_weight(i, n) * f(spec.x_min + static_cast<double>(i) * h);
        return acc;
    });
    return sum * h / 3.0;
}

double simpson_integrate_serial(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    check_spec(spec);
    const std::size_t n = spec.points;
    const double h = (spec.x_max - spec.x_min) / static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += simpson_weight(i, n) * f(spec.x_min + static_cast<double>(i) * h);
    return acc * h / 3.0;
}

FisherResult fisher_information(const GaussianMixture1D& g, const QuadratureSpec& spec) {
    const double value = simpson_integrate(
        [&](double x) {
            const double s = g.log_density_derivative(x, 1);
            return s * s * g.pdf(x);
        },
        spec);

    double tail = 0.0;
    for (const auto& c : g.components()) {
        const double zl = (spec.x_min - c.mean) / (c.std * 1.4142135623730950488);
        const double zr = (spec.x_max - c.mean) / (c.std * 1.4142135623730950488);
        tail += c.weight * 0.5 * (std::erfc(-zl) + std::erfc(zr));
    }
    return FisherResult{value, tail, tail <= 1e-10};
}

}  // namespace dsm
