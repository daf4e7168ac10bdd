#include "dsm/score_estimators.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "dsm/parallel.hpp"

namespace dsm {

double conditional_score(double x0, double x_t, double sigma, int order) {
    if (order < 1) throw std::invalid_argument("conditional_score: order must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("conditional_score: sigma must be positive");
    if (order == 1) return (x0 - x_t) / (sigma * sigma);
    if (order == 2) return -1.0 / (sigma * sigma);
    return 0.0;
}

ScoreDerivs analytic_marginal(const GaussianMixture1D& prior, double sigma) {
    auto perturbed = std::make_shared<GaussianMixture1D>(prior.perturbed(sigma));
    return [perturbed](double x, int order) { return perturbed->log_density_derivative(x, order); };
}

namespace {

// Everything h_1..h_4 needs at a fixed x_t. With the Gaussian kernel,
// a = s_1(x_t|x0) is affine in x0 with constant x_t-derivative ap, so the
// whole chain reduces to polynomials in (a, m1, m2, m3).
struct ChainContext {
    double x_t;
    double inv_s2;  // 1/sigma^2
    double m1, m2, m3;
};

ChainContext make_context(double x_t, double sigma, const ScoreDerivs& marginal, int order) {
    ChainContext c{};
    c.x_t = x_t;
    c.inv_s2 = 1.0 / (sigma * sigma);
    c.m1 = marginal(x_t, 1);
    c.m2 = order >= 3 ? marginal(x_t, 2) : 0.0;
    c.m3 = order >= 4 ? marginal(x_t, 3) : 0.0;
    return c;
}

double h_chain(int order, double x0, const ChainContext& c) {
    const double ap = -c.inv_s2;
    const double a = (x0 - c.x_t) * c.inv_s2;
    if (order == 1) return a;
    const double d = a - c.m1;
    const double h2 = ap + a * d;
    if (order == 2) return h2;
    const double dp = ap - c.m2;
    const double h2p = ap * d + a * dp;
    const double h3 = h2p + h2 * d;
    if (order == 3) return h3;
    const double dpp = -c.m3;
    const double h2pp = 2.0 * ap * dp + a * dpp;
    const double h3p = h2pp + h2p * d + h2 * dp;
    return h3p + h3 * d;
}

constexpr int kMaxOrder = 6;

double h_term_impl(int order, double x0, double x_t, double sigma, const ScoreDerivs& marginal) {
    if (order <= 4) {
        const ChainContext c = make_context(x_t, sigma, marginal, order);
        return h_chain(order, x0, c);
    }
    const double step = 1e-5 * std::max(1.0, std::abs(x_t));
    const double lo = h_term_impl(order - 1, x0, x_t - step, sigma, marginal);
    const double hi = h_term_impl(order - 1, x0, x_t + step, sigma, marginal);
    const double mid = h_term_impl(order - 1, x0, x_t, sigma, marginal);
    const double d = (x0 - x_t) / (sigma * sigma) - marginal(x_t, 1);
    return (hi - lo) / (2.0 * step) + mid * d;
}

}  // namespace

double h_term(int order, double x0, double x_t, double sigma, const ScoreDerivs& marginal) {
    if (order < 1) throw std::invalid_argument("h_term: order must be >= 1");
    if (order > kMaxOrder)
        throw std::invalid_argument("h_term: orders beyond 6 are not supported");
    return h_term_impl(order, x0, x_t, sigma, marginal);
}

HkTerm make_h1(double sigma) {
    const double inv_s2 = 1.0 / (sigma * sigma);
    return HkTerm{1, [inv_s2](double x0, double x_t) { return (x0 - x_t) * inv_s2; },
                  [inv_s2](double, double) { return -inv_s2; }};
}

HkTerm apply_score_operator(const HkTerm& h, const std::function<double(double)>& marginal_score,
                            double sigma) {
    if (h.order < 1) throw std::invalid_argument("apply_score_operator: h.order must be >= 1");
    const double inv_s2 = 1.0 / (sigma * sigma);
    auto value = h.value;
    auto deriv = h.d_dxt;
    auto next = [value, deriv, marginal_score, inv_s2](double x0, double x_t) {
        double dh;
        if (deriv) {
            dh = deriv(x0, x_t);
        } else {
            const double step = 1e-5 * std::max(1.0, std::abs(x_t));
            dh = (value(x0, x_t + step) - value(x0, x_t - step)) / (2.0 * step);
        }
        const double cond = (x0 - x_t) * inv_s2;
        return dh + value(x0, x_t) * (cond - marginal_score(x_t));
    };
    return HkTerm{h.order + 1, std::move(next), {}};
}

namespace {

constexpr std::size_t kMcBlock = 8192;

McEstimate mc_from_sums(double sum, double sumsq, std::size_t n) {
    const double mean = sum / static_cast<double>(n);
    double var = (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;
    return McEstimate{mean, std::sqrt(var / static_cast<double>(n)), n};
}

// Shared MC loop: draws x0 from the conjugate posterior in fixed blocks with
// per-block substreams and evaluates `stat(x0)`.
template <class Stat>
McEstimate posterior_mc(const GaussianMixture1D& posterior, std::size_t n, Rng& rng, Stat&& stat) {
    double sum = 0.0, sumsq = 0.0;
    chunked_sum2(
        n, kMcBlock,
        [&](std::size_t lo, std::size_t hi, double& a, double& b) {
            Rng block_rng = rng.split(lo / kMcBlock);
            double s = 0.0, s2 = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const double v = stat(posterior.sample_one(block_rng));
                s += v;
                s2 += v * v;
            }
            a = s;
            b = s2;
        },
        sum, sumsq);
    return mc_from_sums(sum, sumsq, n);
}

}  // namespace

McEstimate estimate_score_mc(const GaussianMixture1D& prior, double sigma, double x_t, int order,
                             std::size_t n, Rng rng) {
    if (n < 2) throw std::invalid_argument("estimate_score_mc: n must be >= 2");
    if (order < 1 || order > kMaxOrder)
        throw std::invalid_argument("estimate_score_mc: order out of supported range 1..6");
    const GaussianMixture1D post = prior.posterior(sigma, x_t);
    const ScoreDerivs marginal = analytic_marginal(prior, sigma);
    if (order <= 4) {
        const ChainContext ctx = make_context(x_t, sigma, marginal, order);
        return posterior_mc(post, n, rng, [&](double x0) { return h_chain(order, x0, ctx); });
    }
    return posterior_mc(post, n, rng,
                        [&](double x0) { return h_term_impl(order, x0, x_t, sigma, marginal); });
}

McEstimate second_order_estimate(EstimatorKind kind, const GaussianMixture1D& prior, double sigma,
                                 double x_t, double delta, std::size_t n, Rng rng) {
    if (n < 2) throw std::invalid_argument("second_order_estimate: n must be >= 2");
    const GaussianMixture1D post = prior.posterior(sigma, x_t);
    const GaussianMixture1D perturbed = prior.perturbed(sigma);
    const double s_hat = perturbed.log_density_derivative(x_t, 1) + delta;
    const double s2c = -1.0 / (sigma * sigma);
    const double inv_s2 = 1.0 / (sigma * sigma);
    switch (kind) {
        case EstimatorKind::T1:
            return posterior_mc(post, n, rng, [&](double x0) {
                const double a = (x0 - x_t) * inv_s2;
                return a * a - a * s_hat + s2c;
            });
        case EstimatorKind::T2:
            return posterior_mc(post, n, rng, [&](double x0) {
                const double a = (x0 - x_t) * inv_s2;
                return (a - s_hat) * (a - s_hat) + s2c;
            });
        case EstimatorKind::T3:
            return posterior_mc(post, n, rng, [&](double x0) {
                const double a = (x0 - x_t) * inv_s2;
                return a * a - s_hat * s_hat + s2c;
            });
    }
    throw std::invalid_argument("second_order_estimate: unknown estimator kind");
}

std::vector<BiasVarianceRow> estimator_bias_variance(EstimatorKind kind,
                                                     const GaussianMixture1D& prior, double sigma,
                                                     const std::vector<double>& x_t_grid,
                                                     double delta, std::size_t n_inner,
                                                     std::size_t n_reps, Rng rng) {
    if (n_reps < 10) throw std::invalid_argument("estimator_bias_variance: n_reps must be >= 10");
    const GaussianMixture1D perturbed = prior.perturbed(sigma);
    std::vector<BiasVarianceRow> rows(x_t_grid.size());
    for (std::size_t p = 0; p < x_t_grid.size(); ++p) {
        const double x_t = x_t_grid[p];
        const double hess = perturbed.log_density_derivative(x_t, 2);
        std::vector<double> est(n_reps);
        // rep substreams keyed by (grid point, rep); the kind is deliberately
        // left out of the key so all estimators see identical draws
#pragma omp parallel for schedule(dynamic, 1)
        for (long long r = 0; r < static_cast<long long>(n_reps); ++r) {
            Rng rep_rng = rng.split(mix_seed(p, static_cast<std::uint64_t>(r)));
            est[static_cast<std::size_t>(r)] =
                second_order_estimate(kind, prior, sigma, x_t, delta, n_inner, rep_rng).estimate;
        }
        double mean = 0.0;
        for (double e : est) mean += e;
        mean /= static_cast<double>(n_reps);
        double var = 0.0;
        for (double e : est) var += (e - mean) * (e - mean);
        var /= static_cast<double>(n_reps - 1);
        rows[p] = BiasVarianceRow{x_t, mean, mean - hess, var,
                                  std::sqrt(var / static_cast<double>(n_reps))};
    }
    return rows;
}

}  // namespace dsm
