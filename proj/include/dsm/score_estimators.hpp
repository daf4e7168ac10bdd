#pragma once
#include <cstddef>
#include <functional>
#include <vector>

#include "dsm/gaussian_mixture.hpp"
#include "dsm/rng.hpp"

namespace dsm {

// Exact k-th derivative of the Gaussian transition kernel's log density with
// respect to x_t: order 1 is (x0 - x_t)/sigma^2, order 2 is -1/sigma^2, and
// all higher orders vanish.
double conditional_score(double x0, double x_t, double sigma, int order);

// Provider of marginal log-density derivatives: f(x, order) -> d^order log p(x).
using ScoreDerivs = std::function<double(double x, int order)>;

// ScoreDerivs backed by the exact sigma-perturbed mixture.
ScoreDerivs analytic_marginal(const GaussianMixture1D& prior, double sigma);

// h_k(x0, x_t) from the score-differential recursion
//   h_1 = s_1(x_t|x0),   h_k = d/dx_t h_{k-1} + h_{k-1} (s_1(x_t|x0) - s_1(x_t)).
// Orders up to 4 are hand-expanded closed forms; orders 5 and 6 differentiate
// the order-below term by central differences (step 1e-5 max(1,|x_t|)).
double h_term(int order, double x0, double x_t, double sigma, const ScoreDerivs& marginal);

// Generic operator form used to validate the hand expansion: a term carries
// its value and, when known analytically, its x_t-derivative.
struct HkTerm {
    int order;
    std::function<double(double x0, double x_t)> value;
    std::function<double(double x0, double x_t)> d_dxt;  // empty: finite differences
};

HkTerm make_h1(double sigma);
HkTerm apply_score_operator(const HkTerm& h, const std::function<double(double)>& marginal_score,
                            double sigma);

struct McEstimate {
    double estimate;
    double std_err;
    std::size_t n;
};

// Monte-Carlo estimate of the k-th marginal score at x_t: draws x0 from the
// exact conjugate posterior and averages h_k. Deterministic in the rng key;
// samples are produced in fixed blocks so the result is thread-count invariant.
McEstimate estimate_score_mc(const GaussianMixture1D& prior, double sigma, double x_t, int order,
                             std::size_t n, Rng rng);

enum class EstimatorKind { T1, T2, T3 };

// Second-order estimators fed a corrupted first-order score s1(x_t) + delta.
// T1 uses it in the cross term, T2 in both difference factors, T3 in the
// squared term.
McEstimate second_order_estimate(EstimatorKind kind, const GaussianMixture1D& prior, double sigma,
                                 double x_t, double delta, std::size_t n, Rng rng);

struct BiasVarianceRow {
    double x_t;
    double estimate;   // mean over reps
    double bias;       // estimate - analytic Hessian
    double variance;   // sample variance across reps
    double std_err;    // of the mean, sqrt(variance / reps)
};

std::vector<BiasVarianceRow> estimator_bias_variance(EstimatorKind kind,
                                                     const GaussianMixture1D& prior, double sigma,
                                                     const std::vector<double>& x_t_grid,
                                                     double delta, std::size_t n_inner,
                                                     std::size_t n_reps, Rng rng);

}  // namespace dsm
