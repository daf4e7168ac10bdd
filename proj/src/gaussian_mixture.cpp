#include "dsm/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dsm/errors.hpp"

namespace dsm {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kWeightSumTol = 1e-12;

double component_log_pdf(const MixtureComponent& c, double x) {
    const double u = (x - c.mean) / c.std;
    return -0.5 * u * u - std::log(c.std) - 0.5 * kLog2Pi;
}
}  // namespace

GaussianMixture1D::GaussianMixture1D(std::vector<MixtureComponent> components)
    : comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("mixture needs at least one component");
    double wsum = 0.0;
    for (const auto& c : comps_) {
        if (!(c.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
        if (!(c.std > 0.0)) throw std::invalid_argument("mixture stds must be positive");
        if (!std::isfinite(c.weight) || !std::isfinite(c.mean) || !std::isfinite(c.std))
            throw std::invalid_argument("mixture parameters must be finite");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("mixture weights must sum to 1 (got " + std::to_string(wsum) + ")");
}

double GaussianMixture1D::responsibilities(double x, double* resp) const {
    const std::size_t n = comps_.size();
    double maxlog = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        resp[i] = std::log(comps_[i].weight) + component_log_pdf(comps_[i], x);
        maxlog = std::max(maxlog, resp[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        resp[i] = std::exp(resp[i] - maxlog);
        sum += resp[i];
    }
    for (std::size_t i = 0; i < n; ++i) resp[i] /= sum;
    return maxlog + std::log(sum);
}

double GaussianMixture1D::log_pdf(double x) const {
    if (!std::isfinite(x)) throw std::domain_error("log_pdf: x must be finite");
    double maxlog = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    // two passes: max for stability, then shifted exp sum
    std::size_t n = comps_.size();
    double logs[8];
    std::vector<double> heap;
    double* lp = logs;
    if (n > 8) {
        heap.resize(n);
        lp = heap.data();
    }
    for (std::size_t i = 0; i < n; ++i) {
        lp[i] = std::log(comps_[i].weight) + component_log_pdf(comps_[i], x);
        maxlog = std::max(maxlog, lp[i]);
    }
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(lp[i] - maxlog);
    return maxlog + std::log(acc);
}

double GaussianMixture1D::pdf(double x) const {
    if (!std::isfinite(x)) throw std::domain_error("pdf: x must be finite");
    double acc = 0.0;
    for (const auto& c : comps_) {
        const double u = (x - c.mean) / c.std;
        acc += c.weight * std::exp(-0.5 * u * u) / (c.std * 2.5066282746310005024);
    }
    return acc;
}

double GaussianMixture1D::log_density_derivative(double x, int order) const {
    if (order < 1) throw std::invalid_argument("log_density_derivative: order must be >= 1");
    if (!std::isfinite(x)) throw std::domain_error("log_density_derivative: x must be finite");
    if (order > 4) {
        // central difference of the next-lower order
        const double h = 1e-4 * std::max(1.0, std::abs(x));
        return (log_density_derivative(x + h, order - 1) - log_density_derivative(x - h, order - 1)) /
               (2.0 * h);
    }

    const std::size_t n = comps_.size();
    double stack[8];
    std::vector<double> heap;
    double* resp = stack;
    if (n > 8) {
        heap.resize(n);
        resp = heap.data();
    }
    responsibilities(x, resp);

    // ratios r_k = p^(k)/p from per-component Gaussian derivative factors
    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = comps_[i].std;
        const double u = (x - comps_[i].mean) / s;
        const double g1 = -u / s;
        r1 += resp[i] * g1;
        if (order >= 2) r2 += resp[i] * (u * u - 1.0) / (s * s);
        if (order >= 3) r3 += resp[i] * (-(u * u * u - 3.0 * u)) / (s * s * s);
        if (order >= 4) r4 += resp[i] * (u * u * u * u - 6.0 * u * u + 3.0) / (s * s * s * s);
    }
    const double l1 = r1;
    if (order == 1) return l1;
    const double l2 = r2 - l1 * l1;
    if (order == 2) return l2;
    const double l3 = r3 - 3.0 * l1 * l2 - l1 * l1 * l1;
    if (order == 3) return l3;
    return r4 - 4.0 * l1 * l3 - 3.0 * l2 * l2 - 6.0 * l1 * l1 * l2 - l1 * l1 * l1 * l1;
}

void GaussianMixture1D::score_and_hessian(double x, double& score, double& hessian) const {
    const std::size_t n = comps_.size();
    double stack[8];
    std::vector<double> heap;
    double* resp = stack;
    if (n > 8) {
        heap.resize(n);
        resp = heap.data();
    }
    responsibilities(x, resp);
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = comps_[i].std;
        const double u = (x - comps_[i].mean) / s;
        r1 += resp[i] * (-u / s);
        r2 += resp[i] * (u * u - 1.0) / (s * s);
    }
    score = r1;
    hessian = r2 - r1 * r1;
}

double GaussianMixture1D::perturbed_score(double x, double sigma) const {
    double s, h;
    perturbed_score_and_hessian(x, sigma, s, h);
    return s;
}

void GaussianMixture1D::perturbed_score_and_hessian(double x, double sigma, double& score,
                                                    double& hessian) const {
    const std::size_t n = comps_.size();
    double logs_stack[8], a_stack[8];
    std::vector<double> heap;
    double* lp = logs_stack;
    double* av = a_stack;
    if (n > 8) {
        heap.resize(2 * n);
        lp = heap.data();
        av = heap.data() + n;
    }
    double maxlog = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = comps_[i].std * comps_[i].std + sigma * sigma;
        const double d = x - comps_[i].mean;
        lp[i] = std::log(comps_[i].weight) - 0.5 * (kLog2Pi + std::log(v)) - 0.5 * d * d / v;
        av[i] = -d / v;
        maxlog = std::max(maxlog, lp[i]);
    }
    double sum = 0.0, r1 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = comps_[i].std * comps_[i].std + sigma * sigma;
        const double r = std::exp(lp[i] - maxlog);
        sum += r;
        r1 += r * av[i];
        r2 += r * (av[i] * av[i] - 1.0 / v);
    }
    r1 /= sum;
    r2 /= sum;
    score = r1;
    hessian = r2 - r1 * r1;
}

GaussianMixture1D GaussianMixture1D::perturbed(double sigma) const {
    if (!(sigma > 0.0)) throw std::invalid_argument("perturbed: sigma must be positive");
    std::vector<MixtureComponent> out = comps_;
    for (auto& c : out) c.std = std::sqrt(c.std * c.std + sigma * sigma);
    return GaussianMixture1D(std::move(out));
}

GaussianMixture1D GaussianMixture1D::posterior(double sigma, double x_t) const {
    if (!(sigma > 0.0)) throw std::invalid_argument("posterior: sigma must be positive");
    const std::size_t n = comps_.size();
    const double s2 = sigma * sigma;
    std::vector<MixtureComponent> out(n);
    std::vector<double> logw(n);
    double maxlog = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = comps_[i].std * comps_[i].std;
        const double marg_v = v + s2;
        const double d = x_t - comps_[i].mean;
        logw[i] = std::log(comps_[i].weight) - 0.5 * (kLog2Pi + std::log(marg_v)) - 0.5 * d * d / marg_v;
        maxlog = std::max(maxlog, logw[i]);
        out[i].mean = (comps_[i].mean * s2 + x_t * v) / marg_v;
        out[i].std = std::sqrt(v * s2 / marg_v);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // responsibilities can underflow to exactly zero; keep them strictly
        // positive so the result is still a valid mixture
        out[i].weight = std::max(std::exp(logw[i] - maxlog), std::numeric_limits<double>::min());
        sum += out[i].weight;
    }
    for (auto& c : out) c.weight /= sum;
    return GaussianMixture1D(std::move(out));
}

double GaussianMixture1D::sample_one(Rng& rng) const {
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t pick = comps_.size() - 1;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        acc += comps_[i].weight;
        if (u < acc) {
            pick = i;
            break;
        }
    }
    return comps_[pick].mean + comps_[pick].std * rng.normal();
}

std::vector<double> GaussianMixture1D::sample(std::size_t n, Rng& rng) const {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_one(rng);
    return out;
}

double GaussianMixture1D::mean() const {
    double m = 0.0;
    for (const auto& c : comps_) m += c.weight * c.mean;
    return m;
}

double GaussianMixture1D::variance() const {
    const double m = mean();
    double v = 0.0;
    for (const auto& c : comps_) v += c.weight * (c.std * c.std + (c.mean - m) * (c.mean - m));
    return v;
}

double GaussianMixture1D::min_mean() const {
    double m = comps_[0].mean;
    for (const auto& c : comps_) m = std::min(m, c.mean);
    return m;
}

double GaussianMixture1D::max_mean() const {
    double m = comps_[0].mean;
    for (const auto& c : comps_) m = std::max(m, c.mean);
    return m;
}

double GaussianMixture1D::max_std() const {
    double s = comps_[0].std;
    for (const auto& c : comps_) s = std::max(s, c.std);
    return s;
}

GaussianMixture1D load_mixture_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mixture config: " + path);
    std::vector<MixtureComponent> comps;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key, eq;
        if (!(ss >> key)) continue;  // blank
        if (key != "component")
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'component', got '" + key + "'");
        MixtureComponent c{};
        if (!(ss >> eq >> c.weight >> c.mean >> c.std) || eq != "=")
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'component = <weight> <mean> <std>'");
        comps.push_back(c);
    }
    if (comps.empty()) throw ConfigError(path + ": no components found");
    try {
        return GaussianMixture1D(std::move(comps));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace dsm
