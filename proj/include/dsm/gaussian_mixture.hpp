#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "dsm/rng.hpp"

namespace dsm {

struct MixtureComponent {
    double weight;
    double mean;
    double std;
};

// Weighted mixture of 1-D normals. Serves as the data prior, as the
// sigma-perturbed marginal (perturbed()), and as the exact conjugate
// posterior of x0 given a noisy observation (posterior()).
//
// All member functions are pure; instances are safe to share across threads.
class GaussianMixture1D {
public:
    explicit GaussianMixture1D(std::vector<MixtureComponent> components);

    double pdf(double x) const;
    double log_pdf(double x) const;

    // k-th derivative of log pdf at x. k=1 is the score, k=2 the Hessian.
    // Orders 1..4 are evaluated through the closed-form ratio recursion on
    // pdf derivatives; higher orders fall back to central differences of the
    // order-4 result and lose roughly two digits per extra order.
    double log_density_derivative(double x, int order) const;

    // Fused score + Hessian of this mixture (saves one responsibility pass).
    void score_and_hessian(double x, double& score, double& hessian) const;

    // Score / Hessian of the sigma-perturbed mixture without materialising it.
    double perturbed_score(double x, double sigma) const;
    void perturbed_score_and_hessian(double x, double sigma, double& score, double& hessian) const;

    // Convolution with N(0, sigma^2): same weights and means, stds sqrt(s^2+sigma^2).
    GaussianMixture1D perturbed(double sigma) const;

    // Exact conjugate posterior of x0 given x_t = x0 + sigma * z.
    // Responsibilities are formed in log space with max subtraction.
    GaussianMixture1D posterior(double sigma, double x_t) const;

    std::vector<double> sample(std::size_t n, Rng& rng) const;
    double sample_one(Rng& rng) const;

    double mean() const;
    double variance() const;
    double min_mean() const;
    double max_mean() const;
    double max_std() const;

    std::size_t size() const { return comps_.size(); }
    const std::vector<MixtureComponent>& components() const { return comps_; }

private:
    // responsibilities r_i = w_i N(x; mu_i, s_i^2) / pdf(x), log-space stable;
    // returns log pdf. `resp` must have size() entries.
    double responsibilities(double x, double* resp) const;

    std::vector<MixtureComponent> comps_;
};

// Config format: one `component = <weight> <mean> <std>` line per component,
// '#' comments and blank lines allowed.
GaussianMixture1D load_mixture_config(const std::string& path);

}  // namespace dsm
