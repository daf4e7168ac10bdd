// Acceptance suite: one pass/fail line per criterion.
//
//   dsm_acceptance                 run everything
//   dsm_acceptance --criterion N   run one criterion
//
// Exit code 0 iff every selected criterion passed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "dsm/gaussian_mixture.hpp"
#include "dsm/noise_schedule.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/rng.hpp"
#include "dsm/sampling.hpp"
#include "dsm/score_estimators.hpp"
#include "dsm/score_net.hpp"
#include "dsm/training.hpp"
#include "dsm/weighting.hpp"

namespace fs = std::filesystem;
using namespace dsm;

namespace {

GaussianMixture1D fig1() {
    return GaussianMixture1D{
        {{0.3258, 0.0, 0.5063}, {0.3316, 2.0, 0.7782}, {0.3426, 4.0, 0.0985}}};
}

GaussianMixture1D gradvar_mix() {
    return GaussianMixture1D{{{0.3, -5.0, 0.1}, {0.3, 5.0, 5.75}, {0.4, 15.0, 5.75}}};
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness: backprop vs finite differences, 100 random
//    configurations, max relative error < 1e-4, runtime < 10 s.
Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    double worst = 0.0;
    const std::vector<MlpLayout> layouts{MlpLayout{{6}}, MlpLayout{{10}}, MlpLayout{{4, 3}}};
    for (int cfg = 0; cfg < 100; ++cfg) {
        auto p = mlp_init(layouts[static_cast<std::size_t>(cfg % 3)],
                          2000 + static_cast<std::uint64_t>(cfg));
        for (double& v : p.values) v += 0.3 * rng.normal();
        std::vector<TrainSample> batch;
        for (int i = 0; i < 8; ++i)
            batch.push_back({rng.uniform(-3, 3), std::exp(rng.uniform(-4.6, 3.9)), rng.normal(),
                             0.1 + rng.uniform01()});
        const auto lg = mlp_loss_and_grad(p, batch);
        for (std::size_t j = 0; j < p.values.size(); ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(p.values[j]));
            auto plus = p, minus = p;
            plus.values[j] += h;
            minus.values[j] -= h;
            const double fd =
                (mlp_loss_and_grad(plus, batch).loss - mlp_loss_and_grad(minus, batch).loss) /
                (2 * h);
            worst = std::max(worst, std::abs(lg.grad[j] - fd) /
                                        std::max({std::abs(fd), std::abs(lg.grad[j]), 1e-6}));
        }
    }
    const double secs = elapsed_s(t0);
    Outcome o;
    o.require(worst < 1e-4, "max rel err " + std::to_string(worst));
    o.require(secs < 10.0, "runtime " + std::to_string(secs) + " s");
    if (o.pass) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "max rel err %.2e over 100 configs", worst);
        o.detail = buf;
    }
    return o;
}

// ---------------------------------------------------------------------------
// 2. Pythagorean gap vs analytic constant within 5% at n=1e6 for
//    sigma in {0.1, 0.5, 1, 5} on the fig1 mixture.
Outcome criterion2() {
    Outcome o;
    const auto data = fig1();
    std::string detail;
    for (double sigma : {0.1, 0.5, 1.0, 5.0}) {
        const auto perturbed = data.perturbed(sigma);
        auto score = [&](double x) { return perturbed.log_density_derivative(x, 1); };
        const auto r = pythagorean_gap(data, sigma, score, 1000000,
                                       Rng(mix_seed(2002, static_cast<std::uint64_t>(sigma * 1e3))));
        const double rel = std::abs(r.gap - r.analytic_constant) / std::abs(r.analytic_constant);
        char buf[96];
        std::snprintf(buf, sizeof buf, "sigma=%g rel=%.3f%% ", sigma, 100.0 * rel);
        detail += buf;
        o.require(rel < 0.05, std::string("rel error at sigma ") + std::to_string(sigma) + " = " +
                                  std::to_string(rel));
    }
    if (o.pass) o.detail = detail;
    return o;
}

// ---------------------------------------------------------------------------
// 3. E[h_k] matches analytic derivatives for k=1,2,3 at n=1e6 on a 9-point
//    grid: |err| <= max(1% |analytic|, 3 SE).
Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    const auto data = fig1();
    const double sigma = 0.5;
    const auto perturbed = data.perturbed(sigma);
    for (int k = 1; k <= 3; ++k) {
        for (int i = 0; i < 9; ++i) {
            const double x_t = -1.0 + 6.0 * i / 8.0;
            const auto est =
                estimate_score_mc(data, sigma, x_t, k, 1000000,
                                  Rng(mix_seed(3003, static_cast<std::uint64_t>(100 * k + i))));
            const double ana = perturbed.log_density_derivative(x_t, k);
            const double err = std::abs(est.estimate - ana);
            const double tol = std::max(0.01 * std::abs(ana), 3.0 * est.std_err);
            if (err > tol) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "k=%d x=%.2f err=%.4g tol=%.4g", k, x_t, err, tol);
                o.require(false, buf);
            }
        }
    }
    const double secs = elapsed_s(t0);
    o.require(secs < 120.0, "runtime " + std::to_string(secs) + " s");
    if (o.pass) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "27 grid points within tolerance");
        o.detail = buf;
    }
    return o;
}

// ---------------------------------------------------------------------------
// 4. Second-order estimator claims at delta=0.2.
Outcome criterion4() {
    Outcome o;
    const double delta = 0.2;
    const std::size_t n_inner = 200000, reps = 30;

    // bias signs at an exact zero-score point (standard normal, x_t = 0)
    const GaussianMixture1D std_normal{{{1.0, 0.0, 1.0}}};
    const std::vector<double> zero{0.0};
    const auto t1 = estimator_bias_variance(EstimatorKind::T1, std_normal, 1.0, zero, delta,
                                            n_inner, reps, Rng(4004));
    const auto t2 = estimator_bias_variance(EstimatorKind::T2, std_normal, 1.0, zero, delta,
                                            n_inner, reps, Rng(4004));
    const auto t3 = estimator_bias_variance(EstimatorKind::T3, std_normal, 1.0, zero, delta,
                                            n_inner, reps, Rng(4004));
    char buf[192];
    std::snprintf(buf, sizeof buf, "bias T1=%.2e(se %.1e) T2=%.4f T3=%.4f vs +/-%.3f; ",
                  t1[0].bias, t1[0].std_err, t2[0].bias, t3[0].bias, delta * delta);
    o.detail = buf;
    o.require(std::abs(t1[0].bias) <= 3.0 * t1[0].std_err, "T1 bias at zero-score point");
    o.require(std::abs(t2[0].bias - delta * delta) <= 3.0 * t2[0].std_err, "T2 bias != +delta^2");
    o.require(std::abs(t3[0].bias + delta * delta) <= 3.0 * t3[0].std_err, "T3 bias != -delta^2");

    // variance ordering on the fig1 mixture at score-dominated grid points
    // (the ordering presumes the score dwarfs the injected error, so the grid
    // avoids the band around the score zero crossings)
    const auto data = fig1();
    const double sigma = 1.0;
    const std::vector<double> grid{-1.5, -1.0, -0.5, 4.6, 5.0, 5.4, 6.0};
    const std::size_t vreps = 200, vn = 50000;
    const auto v1 = estimator_bias_variance(EstimatorKind::T1, data, sigma, grid, delta, vn,
                                            vreps, Rng(4005));
    const auto v2 = estimator_bias_variance(EstimatorKind::T2, data, sigma, grid, delta, vn,
                                            vreps, Rng(4005));
    const auto v3 = estimator_bias_variance(EstimatorKind::T3, data, sigma, grid, delta, vn,
                                            vreps, Rng(4005));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(v2[i].variance <= v1[i].variance && v2[i].variance <= v3[i].variance)) {
            std::snprintf(buf, sizeof buf, "Var order broken at x=%.2f (T1 %.3g T2 %.3g T3 %.3g)",
                          grid[i], v1[i].variance, v2[i].variance, v3[i].variance);
            o.require(false, buf);
        }
    }
    if (o.pass) o.detail += "Var(T2) minimal at all 7 grid points";
    return o;
}

// ---------------------------------------------------------------------------
// 5. Weighting bounds across the 10-level schedule.
Outcome criterion5() {
    Outcome o;
    const auto data = fig1();
    const NoiseSchedule sched(0.01, 50.0);
    const double fisher0 = fisher_information(data).value;

    for (double sigma : sched.sigma_levels(10)) {
        const double fisher = fisher_information(data.perturbed(sigma)).value;
        const double w = optimal_expected_weight(sigma, fisher);
        const double s2 = sigma * sigma;
        o.require(w >= s2 * (1 - 1e-12), "lower bound at sigma " + std::to_string(sigma));
        o.require(w <= stam_upper_bound(sigma, fisher0) * (1 + 1e-12),
                  "upper bound at sigma " + std::to_string(sigma));
        if (sigma <= 0.1)
            o.require(std::abs(w - s2) <= 2.0 * s2 * s2 * fisher,
                      "first-order bound at sigma " + std::to_string(sigma));
    }

    // Stam bound with equality for pure-Gaussian data
    const GaussianMixture1D gauss{{{1.0, 0.0, 1.0}}};
    for (double sigma : {0.1, 1.0, 5.0}) {
        const double fisher = fisher_information(gauss.perturbed(sigma)).value;
        const double w = optimal_expected_weight(sigma, fisher);
        const double bound = stam_upper_bound(sigma, 1.0);
        o.require(std::abs(w - bound) <= 1e-8 * std::max(1.0, bound),
                  "Gaussian equality at sigma " + std::to_string(sigma));
    }
    if (o.pass) o.detail = "bounds hold at all 10 levels; Gaussian equality exact";
    return o;
}

// ---------------------------------------------------------------------------
// 6. Gradient variance ordering on the gradvar mixture.
Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    const auto data = gradvar_mix();
    const NoiseSchedule sched(0.01, 50.0);
    const MlpLayout layout{{6}};

    // heuristic pre-training per the measurement protocol
    TrainConfig pre{data, sched, WeightingScheme::heuristic(), layout, 128, 10000, 4e-3,
                    10000, 256, 200, 606};
    const MlpParams net = train(pre).params;

    const auto sigmas = sched.sigma_levels(10);
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    TrainConfig hcfg{data, sched, WeightingScheme::heuristic(), layout, 128, 1, 4e-3, 1, 16, 16, 0};
    TrainConfig ocfg{data, sched, WeightingScheme::optimal_pointwise(data), layout, 128, 1, 4e-3,
                     1, 16, 16, 0};
    const auto h = gradient_variance(hcfg, net, sigmas, 10, seeds);
    const auto op = gradient_variance(ocfg, net, sigmas, 10, seeds);

    // top third of 10 levels: indices 7, 8, 9
    for (std::size_t lvl = 7; lvl < 10; ++lvl) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "level %zu: heuristic %.4g >= optimal %.4g", lvl,
                      h.trace_mean[lvl], op.trace_mean[lvl]);
        o.require(h.trace_mean[lvl] < op.trace_mean[lvl], buf);
    }
    o.require(h.trace_mean[9] + h.trace_se[9] < op.trace_mean[9] - op.trace_se[9],
              "1-SE bands overlap at the top level");
    const double secs = elapsed_s(t0);
    o.require(secs < 300.0, "runtime " + std::to_string(secs) + " s");
    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "top level: heuristic %.4g+-%.2g vs optimal %.4g+-%.2g",
                      h.trace_mean[9], h.trace_se[9], op.trace_mean[9], op.trace_se[9]);
        o.detail = buf;
    }
    return o;
}

// ---------------------------------------------------------------------------
// 7. Figure-1 protocol: 25-parameter model, 80k iterations, ED every 2000.
Outcome criterion7() {
    Outcome o;
    const auto data = fig1();
    const NoiseSchedule sched(0.01, 50.0);
    std::string detail;

    for (const char* scheme : {"heuristic", "optimal"}) {
        TrainConfig cfg{data,
                        sched,
                        WeightingScheme::make(parse_weighting(scheme), data, sched),
                        MlpLayout{{6}},
                        128,
                        80000,
                        4e-3,
                        2000,
                        5000,
                        1000,
                        mix_seed(7007, fnv1a(scheme, std::strlen(scheme)))};
        const auto res = train(cfg);
        const double baseline = res.log.gen_smoothed.back();
        const double final_ed = res.log.model_smoothed.back();
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: baseline %.4g, final smoothed ED %.4g; ", scheme,
                      baseline, final_ed);
        detail += buf;
        o.require(baseline <= 0.1, std::string(scheme) + ": baseline ED > 0.1");
        o.require(final_ed <= 2.0 * baseline, std::string(scheme) + ": final ED > 2x baseline");
        o.require(final_ed <= 0.35, std::string(scheme) + ": final ED > 0.35");
    }
    o.detail = detail + (o.detail.empty() ? "" : ("| " + o.detail));
    return o;
}

// ---------------------------------------------------------------------------
// 8. Model-size trend: params {25, 361, 1321} x weightings x 3 seeds.
Outcome criterion8() {
    Outcome o;
    const auto data = fig1();
    const NoiseSchedule sched(0.01, 50.0);
    const std::vector<std::size_t> sizes{25, 361, 1321};

    std::map<std::string, std::vector<std::pair<double, double>>> results;  // (mean, se) per size
    std::string detail;
    for (const char* scheme : {"heuristic", "optimal"}) {
        for (std::size_t params : sizes) {
            std::vector<double> finals;
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                TrainConfig cfg{data,
                                sched,
                                WeightingScheme::make(parse_weighting(scheme), data, sched),
                                MlpLayout::for_param_count(params),
                                128,
                                80000,
                                4e-3,
                                8000,
                                5000,
                                1000,
                                mix_seed(8008, mix_seed(params, seed))};
                const auto res = train(cfg);
                finals.push_back(res.log.model_smoothed.back());
            }
            double mean = (finals[0] + finals[1] + finals[2]) / 3.0;
            double var = 0.0;
            for (double f : finals) var += (f - mean) * (f - mean);
            const double se = std::sqrt(var / 2.0 / 3.0);
            results[scheme].push_back({mean, se});
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s/%zu: %.4g+-%.2g ", scheme, params, mean, se);
            detail += buf;
            std::printf("  [criterion 8] %s\n", buf);
            std::fflush(stdout);
        }
    }

    for (const char* scheme : {"heuristic", "optimal"}) {
        const auto& r = results[scheme];
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const double se_diff =
                std::sqrt(r[i].second * r[i].second + r[i + 1].second * r[i + 1].second);
            o.require(r[i + 1].first <= r[i].first + se_diff,
                      std::string(scheme) + ": ED increases from size " + std::to_string(sizes[i]) +
                          " to " + std::to_string(sizes[i + 1]));
        }
    }
    const auto& rh = results["heuristic"].back();
    const auto& ro = results["optimal"].back();
    const double se_diff = std::sqrt(rh.second * rh.second + ro.second * ro.second);
    o.require(std::abs(rh.first - ro.first) < 2.0 * se_diff,
              "weightings differ at the largest size by more than 2 SE");
    o.detail = detail + (o.pass ? "" : ("| " + o.detail));
    return o;
}

// ---------------------------------------------------------------------------
// 9. Unbiasedness of DSM gradients: paired DSM/SM batches at fixed params.
Outcome criterion9() {
    Outcome o;
    const auto data = fig1();
    const NoiseSchedule sched(0.01, 50.0);
    const auto params = mlp_init(MlpLayout{{6}}, 909);
    const std::size_t nb = 200;
    TrainConfig cfg{data, sched, WeightingScheme::heuristic(), MlpLayout{{6}}, 128, 1, 1e-3, 1,
                    16, 16, 0};

    for (double sigma : {0.1, 1.0, 10.0}) {
        const auto perturbed = data.perturbed(sigma);
        Rng rng(mix_seed(9009, static_cast<std::uint64_t>(sigma * 10)));
        std::vector<double> mean(params.values.size(), 0.0), m2(params.values.size(), 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            auto batch = dsm_batch(cfg, sigma, rng);
            auto sm = batch;
            for (auto& s : sm) s.target = perturbed.log_density_derivative(s.x, 1);
            const auto gd = mlp_loss_and_grad(params, batch);
            const auto gs = mlp_loss_and_grad(params, sm);
            for (std::size_t j = 0; j < mean.size(); ++j) {
                const double d = gd.grad[j] - gs.grad[j];
                const double delta = d - mean[j];
                mean[j] += delta / static_cast<double>(b + 1);
                m2[j] += delta * (d - mean[j]);
            }
        }
        int violations = 0;
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double se =
                std::sqrt(m2[j] / static_cast<double>(nb - 1) / static_cast<double>(nb));
            if (std::abs(mean[j]) > 3.0 * se + 1e-14) ++violations;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "sigma=%g: %d/25 coordinates out of 3 SE", sigma, violations);
        o.require(violations == 0, buf);
    }
    if (o.pass) o.detail = "all coordinates within 3 SE at sigma {0.1, 1, 10}";
    return o;
}

// ---------------------------------------------------------------------------
// 10. Determinism: figures manifest run twice, byte-identical CSVs.
Outcome criterion10() {
    Outcome o;
    const std::string manifest = std::string(DSM_SOURCE_DIR) + "/configs/figures_smoke.run";
    const fs::path base = fs::temp_directory_path() / "dsm_acceptance_det";
    fs::remove_all(base);

    for (int run = 0; run < 2; ++run) {
        dsmcli::GlobalOpts g;
        g.seed = 20240809;
        g.out_dir = (base / ("run" + std::to_string(run))).string();
        const int rc = dsmcli::run_command("figures", {"--manifest", manifest}, g);
        o.require(rc == 0, "figures run " + std::to_string(run) + " exited " + std::to_string(rc));
    }
    if (!o.pass) return o;

    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "run0")) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const fs::path rel = fs::relative(entry.path(), base / "run0");
        const fs::path other = base / "run1" / rel;
        if (!fs::exists(other)) {
            o.require(false, "missing in rerun: " + rel.string());
            continue;
        }
        std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (sa.str() != sb.str()) o.require(false, "differs: " + rel.string());
    }
    o.require(files >= 20, "expected at least 20 CSVs, saw " + std::to_string(files));
    if (o.pass) o.detail = std::to_string(files) + " files byte-identical across reruns";
    fs::remove_all(base);
    return o;
}

const char* kDescriptions[10] = {
    "gradient correctness (backprop vs finite differences)",
    "pythagorean gap matches the analytic constant",
    "iterative MC estimator matches analytic derivatives (k=1,2,3)",
    "second-order estimator bias/variance claims",
    "weighting bounds and Stam equality",
    "gradient-variance ordering at high noise levels",
    "figure-1 training protocol (25 params, 80k iterations)",
    "model-size convergence trend",
    "unbiasedness of DSM gradients",
    "figures determinism (byte-identical reruns)",
};

Outcome (*kCriteria[10])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                              criterion6, criterion7, criterion8, criterion9, criterion10};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

    bool all_pass = true;
    for (int c = 1; c <= 10; ++c) {
        if (only != 0 && c != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = kCriteria[c - 1]();
        std::printf("%s criterion %2d: %s%s%s  [%.0f s]\n", o.pass ? "PASS" : "FAIL", c,
                    kDescriptions[c - 1], o.detail.empty() ? "" : " -- ", o.detail.c_str(),
                    elapsed_s(t0));
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
