#include "commands.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "csv_out.hpp"
#include "dsm/errors.hpp"
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

namespace dsmcli {

namespace {

std::uint64_t hash_invocation(const std::string& name, const Args& args, std::uint64_t seed) {
    std::string all = name;
    for (const auto& a : args) {
        all += ' ';
        all += a;
    }
    all += ' ';
    all += std::to_string(seed);
    return dsm::fnv1a(all.data(), all.size());
}

std::string resolve_input(const std::string& path, const GlobalOpts& g) {
    if (path.empty() || fs::path(path).is_absolute() || fs::exists(path)) return path;
    if (!g.base_dir.empty()) {
        const fs::path joined = fs::path(g.base_dir) / path;
        if (fs::exists(joined)) return joined.string();
    }
    return path;
}

std::string out_path(const std::string& path, const GlobalOpts& g) {
    fs::path p = g.out_dir.empty() || fs::path(path).is_absolute() ? fs::path(path)
                                                                   : fs::path(g.out_dir) / path;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

// --density accepts a config path or the two bundled mixture names.
dsm::GaussianMixture1D mixture_from_spec(const std::string& spec, const GlobalOpts& g) {
    if (spec.empty() || spec == "fig1")
        return dsm::GaussianMixture1D{{{0.3258, 0.0, 0.5063}, {0.3316, 2.0, 0.7782}, {0.3426, 4.0, 0.0985}}};
    if (spec == "gradvar")
        return dsm::GaussianMixture1D{{{0.3, -5.0, 0.1}, {0.3, 5.0, 5.75}, {0.4, 15.0, 5.75}}};
    return dsm::load_mixture_config(resolve_input(spec, g));
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw dsm::ConfigError("empty number list: '" + csv + "'");
    return out;
}

std::vector<long> parse_long_list(const std::string& csv) {
    std::vector<long> out;
    for (double v : parse_double_list(csv)) out.push_back(static_cast<long>(v));
    return out;
}

int parse_or_exit(CLI::App& app, const Args& args) {
    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return -1;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------- weights --

int cmd_weights(const Args& args, const GlobalOpts& g) {
    CLI::App app{"per-level weighting curves (heuristic vs optimal)"};
    std::string density = "fig1", out_dir = "weights";
    int levels = 10, x_points = 400;
    double x_min = -2.0, x_max = 6.0, sigma_min = 0.01, sigma_max = 50.0;
    app.add_option("--density", density);
    app.add_option("--levels", levels);
    app.add_option("--x-min", x_min);
    app.add_option("--x-max", x_max);
    app.add_option("--x-points", x_points);
    app.add_option("--out-dir", out_dir);
    app.add_option("--sigma-min", sigma_min);
    app.add_option("--sigma-max", sigma_max);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const auto data = mixture_from_spec(density, g);
    const dsm::NoiseSchedule sched(sigma_min, sigma_max);
    const auto sigmas = sched.sigma_levels(static_cast<std::size_t>(levels));
    const std::uint64_t hash = hash_invocation("weights", args, g.seed);

    for (int lvl = 0; lvl < levels; ++lvl) {
        const double sigma = sigmas[static_cast<std::size_t>(lvl)];
        CsvWriter csv(out_path(out_dir + "/level" + std::to_string(lvl) + ".csv", g), hash, g.seed,
                      {"x", "sigma_t", "conventional_weights", "optimal_weights"});
        for (int i = 0; i < x_points; ++i) {
            const double x = x_min + (x_max - x_min) * static_cast<double>(i) /
                                         static_cast<double>(x_points - 1);
            double score, hess;
            data.perturbed_score_and_hessian(x, sigma, score, hess);
            csv.row({x, sigma, dsm::heuristic_weight(sigma), dsm::optimal_pointwise_weight(sigma, hess)});
        }
    }
    return kExitOk;
}

// ------------------------------------------------------------------ train --

namespace {

struct TrainFlags {
    std::string density = "fig1";
    std::string weighting = "heuristic";
    long params = 25;
    long iters = 80000;
    long eval_every = 2000;
    long batch = 128;
    double lr = 4e-3;
    double sigma_min = 0.01, sigma_max = 50.0;
    long eval_samples = 5000;
    long steps = 1000;
};

void add_train_flags(CLI::App& app, TrainFlags& f) {
    app.add_option("--density", f.density);
    app.add_option("--weighting", f.weighting);
    app.add_option("--params", f.params);
    app.add_option("--iters", f.iters);
    app.add_option("--eval-every", f.eval_every);
    app.add_option("--batch", f.batch);
    app.add_option("--lr", f.lr);
    app.add_option("--sigma-min", f.sigma_min);
    app.add_option("--sigma-max", f.sigma_max);
    app.add_option("--eval-samples", f.eval_samples);
    app.add_option("--steps", f.steps);
}

dsm::TrainConfig make_train_config(const TrainFlags& f, const GlobalOpts& g, std::uint64_t seed) {
    dsm::GaussianMixture1D data = mixture_from_spec(f.density, g);
    dsm::NoiseSchedule sched(f.sigma_min, f.sigma_max);
    dsm::WeightingScheme scheme =
        dsm::WeightingScheme::make(dsm::parse_weighting(f.weighting), data, sched);
    return dsm::TrainConfig{std::move(data),
                            sched,
                            std::move(scheme),
                            dsm::MlpLayout::for_param_count(static_cast<std::size_t>(f.params)),
                            static_cast<int>(f.batch),
                            f.iters,
                            f.lr,
                            f.eval_every,
                            static_cast<std::size_t>(f.eval_samples),
                            static_cast<std::size_t>(f.steps),
                            seed};
}

const std::vector<std::string> kRunLogColumns = {
    "iterations",          "train_loss",
    "model_sample_ed",     "model_sample_ed_smoothed",
    "model_sample_ed_lb",  "model_sample_ed_ub",
    "gen_sample_ed",       "gen_sample_ed_smoothed",
    "gen_sample_ed_lb",    "gen_sample_ed_ub"};

void write_runlog(const std::string& path, const dsm::RunLog& log, std::uint64_t hash,
                  std::uint64_t seed) {
    CsvWriter csv(path, hash, seed, kRunLogColumns);
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        csv.row_int_first(r.iteration,
                          {r.train_loss, r.model_sample_ed, log.model_smoothed[i], r.model_sample_ed,
                           r.model_sample_ed, r.gen_sample_ed, log.gen_smoothed[i], r.gen_sample_ed,
                           r.gen_sample_ed});
    }
}

}  // namespace

int cmd_train(const Args& args, const GlobalOpts& g) {
    CLI::App app{"weighted DSM training run"};
    TrainFlags f;
    std::string out = "train.csv", save_model;
    app.add_option("--out", out);
    app.add_option("--save-model", save_model);
    add_train_flags(app, f);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const auto cfg = make_train_config(f, g, g.seed);
    const auto result = dsm::train(cfg);
    write_runlog(out_path(out, g), result.log, hash_invocation("train", args, g.seed), g.seed);
    if (!save_model.empty()) dsm::mlp_save(result.params, out_path(save_model, g));
    return kExitOk;
}

int cmd_trainsweep(const Args& args, const GlobalOpts& g) {
    CLI::App app{"multi-seed training sweep, aggregated into figure-layout CSVs"};
    TrainFlags f;
    std::string params_list = "25", out_dir = "sweep", prefix;
    long seeds = 3;
    app.add_option("--params", params_list);
    app.add_option("--seeds", seeds);
    app.add_option("--out-dir", out_dir);
    app.add_option("--prefix", prefix);
    app.add_option("--density", f.density);
    app.add_option("--weighting", f.weighting);
    app.add_option("--iters", f.iters);
    app.add_option("--eval-every", f.eval_every);
    app.add_option("--batch", f.batch);
    app.add_option("--lr", f.lr);
    app.add_option("--sigma-min", f.sigma_min);
    app.add_option("--sigma-max", f.sigma_max);
    app.add_option("--eval-samples", f.eval_samples);
    app.add_option("--steps", f.steps);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const std::uint64_t hash = hash_invocation("trainsweep", args, g.seed);
    for (long params : parse_long_list(params_list)) {
        TrainFlags fp = f;
        fp.params = params;
        std::vector<dsm::RunLog> logs;
        for (long s = 0; s < seeds; ++s) {
            const std::uint64_t run_seed =
                dsm::mix_seed(g.seed, dsm::mix_seed(static_cast<std::uint64_t>(params),
                                                    static_cast<std::uint64_t>(s)));
            logs.push_back(dsm::train(make_train_config(fp, g, run_seed)).log);
        }
        // aggregate across seeds per eval point
        const std::size_t rows = logs.front().records.size();
        const double ns = static_cast<double>(seeds);
        std::vector<double> model_mean(rows), model_se(rows), gen_mean(rows), gen_se(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            double ma = 0.0, ga = 0.0;
            for (const auto& lg : logs) {
                ma += lg.records[i].model_sample_ed;
                ga += lg.records[i].gen_sample_ed;
            }
            ma /= ns;
            ga /= ns;
            double mv = 0.0, gv = 0.0;
            for (const auto& lg : logs) {
                mv += (lg.records[i].model_sample_ed - ma) * (lg.records[i].model_sample_ed - ma);
                gv += (lg.records[i].gen_sample_ed - ga) * (lg.records[i].gen_sample_ed - ga);
            }
            model_mean[i] = ma;
            gen_mean[i] = ga;
            model_se[i] = seeds > 1 ? std::sqrt(mv / (ns - 1.0) / ns) : 0.0;
            gen_se[i] = seeds > 1 ? std::sqrt(gv / (ns - 1.0) / ns) : 0.0;
        }
        const auto model_sm = dsm::moving_average5(model_mean);
        const auto gen_sm = dsm::moving_average5(gen_mean);

        const std::string name =
            prefix + f.weighting + "_params" + std::to_string(params) + ".csv";
        CsvWriter csv(out_path(out_dir + "/" + name, g), hash, g.seed,
                      {"iterations", "model_sample_ed", "model_sample_ed_smoothed",
                       "model_sample_ed_lb", "model_sample_ed_ub", "model_sample_ed_mean",
                       "model_sample_ed_std_err", "gen_sample_ed", "gen_sample_ed_smoothed",
                       "gen_sample_ed_lb", "gen_sample_ed_ub"});
        for (std::size_t i = 0; i < rows; ++i) {
            csv.row_int_first(logs.front().records[i].iteration,
                              {model_mean[i], model_sm[i], model_mean[i] - model_se[i],
                               model_mean[i] + model_se[i], model_mean[i], model_se[i], gen_mean[i],
                               gen_sm[i], gen_mean[i] - gen_se[i], gen_mean[i] + gen_se[i]});
        }
    }
    return kExitOk;
}

// ----------------------------------------------------------------- sample --

int cmd_sample(const Args& args, const GlobalOpts& g) {
    CLI::App app{"reverse-SDE sampling with the analytic or a trained score"};
    std::string score = "analytic", density = "fig1", out = "samples.csv";
    long n = 5000, steps = 1000;
    double sigma_min = 0.01, sigma_max = 50.0;
    app.add_option("--score", score);
    app.add_option("--density", density);
    app.add_option("--n", n);
    app.add_option("--steps", steps);
    app.add_option("--out", out);
    app.add_option("--sigma-min", sigma_min);
    app.add_option("--sigma-max", sigma_max);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const auto data = mixture_from_spec(density, g);
    const dsm::NoiseSchedule sched(sigma_min, sigma_max);
    dsm::SamplerConfig sc{static_cast<std::size_t>(steps), 0.0, static_cast<std::size_t>(n)};

    std::vector<double> samples;
    std::optional<dsm::MlpParams> model;
    if (score == "analytic") {
        samples = dsm::reverse_sde_sample(dsm::analytic_score_fn(data), sched, sc, dsm::Rng(g.seed));
    } else if (score.rfind("model:", 0) == 0) {
        model = dsm::mlp_load(resolve_input(score.substr(6), g));
        samples = dsm::reverse_sde_sample(dsm::model_score_fn(*model), sched, sc, dsm::Rng(g.seed));
    } else {
        throw dsm::ConfigError("--score must be 'analytic' or 'model:<path>'");
    }

    CsvWriter csv(out_path(out, g), hash_invocation("sample", args, g.seed), g.seed, {"sample"});
    for (double s : samples) csv.row({s});
    return kExitOk;
}

// ------------------------------------------------------------- estimators --

int cmd_estimators(const Args& args, const GlobalOpts& g) {
    CLI::App app{"second-order estimator bias/variance table"};
    std::string kind = "all", density = "fig1", out = "estimators.csv";
    double delta = 0.2, sigma = 1.0, x_min = -1.0, x_max = 5.0;
    long n = 100000, reps = 20, x_points = 9;
    app.add_option("--kind", kind);
    app.add_option("--delta", delta);
    app.add_option("--sigma", sigma);
    app.add_option("--n", n);
    app.add_option("--reps", reps);
    app.add_option("--out", out);
    app.add_option("--density", density);
    app.add_option("--x-min", x_min);
    app.add_option("--x-max", x_max);
    app.add_option("--x-points", x_points);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const auto data = mixture_from_spec(density, g);
    std::vector<double> grid(static_cast<std::size_t>(x_points));
    for (long i = 0; i < x_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(x_points - 1);

    std::vector<std::pair<std::string, dsm::EstimatorKind>> kinds;
    if (kind == "t1" || kind == "all") kinds.emplace_back("t1", dsm::EstimatorKind::T1);
    if (kind == "t2" || kind == "all") kinds.emplace_back("t2", dsm::EstimatorKind::T2);
    if (kind == "t3" || kind == "all") kinds.emplace_back("t3", dsm::EstimatorKind::T3);
    if (kinds.empty()) throw dsm::ConfigError("--kind must be t1|t2|t3|all");

    CsvWriter csv(out_path(out, g), hash_invocation("estimators", args, g.seed), g.seed,
                  {"x_t", "kind", "estimate", "bias", "variance", "std_err"});
    for (const auto& [label, k] : kinds) {
        const auto rows = dsm::estimator_bias_variance(k, data, sigma, grid, delta,
                                                       static_cast<std::size_t>(n),
                                                       static_cast<std::size_t>(reps),
                                                       dsm::Rng(g.seed));
        for (const auto& r : rows) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g", r.x_t, label.c_str(),
                          r.estimate, r.bias, r.variance, r.std_err);
            csv.row_raw(buf);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- gradvar --

int cmd_gradvar(const Args& args, const GlobalOpts& g) {
    CLI::App app{"per-level gradient covariance traces, heuristic vs optimal weighting"};
    std::string density = "gradvar", out = "gradvar.csv";
    long params = 25, batches = 10, seeds = 3, levels = 10, train_iters = 10000, batch = 128;
    double sigma_min = 0.01, sigma_max = 50.0, lr = 4e-3;
    bool at_init = false;
    app.add_option("--density", density);
    app.add_option("--params", params);
    app.add_option("--batches", batches);
    app.add_option("--seeds", seeds);
    app.add_option("--levels", levels);
    app.add_option("--out", out);
    app.add_option("--train-iters", train_iters);
    app.add_option("--batch", batch);
    app.add_option("--lr", lr);
    app.add_option("--sigma-min", sigma_min);
    app.add_option("--sigma-max", sigma_max);
    app.add_flag("--at-init", at_init);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    auto data = mixture_from_spec(density, g);
    const dsm::NoiseSchedule sched(sigma_min, sigma_max);
    const auto layout = dsm::MlpLayout::for_param_count(static_cast<std::size_t>(params));

    // the model is trained with the heuristic weighting; the covariance is
    // then measured under each weighting at those parameters
    dsm::MlpParams net = dsm::mlp_init(layout, dsm::mix_seed(g.seed, 0x1717));
    if (!at_init) {
        dsm::TrainConfig tc{data,
                            sched,
                            dsm::WeightingScheme::heuristic(),
                            layout,
                            static_cast<int>(batch),
                            train_iters,
                            lr,
                            train_iters,  // evals only at the ends
                            256,          // tiny eval, not reported
                            200,
                            g.seed};
        net = dsm::train(tc).params;
    }

    const auto sigmas = sched.sigma_levels(static_cast<std::size_t>(levels));
    std::vector<std::uint64_t> seed_list;
    for (long s = 0; s < seeds; ++s) seed_list.push_back(dsm::mix_seed(g.seed, 0xABC0 + static_cast<std::uint64_t>(s)));

    dsm::TrainConfig heur_cfg{data, sched, dsm::WeightingScheme::heuristic(), layout,
                              static_cast<int>(batch), 1, lr, 1, 16, 16, g.seed};
    dsm::TrainConfig opt_cfg{data, sched, dsm::WeightingScheme::optimal_pointwise(data), layout,
                             static_cast<int>(batch), 1, lr, 1, 16, 16, g.seed};
    const auto heur = dsm::gradient_variance(heur_cfg, net, sigmas, static_cast<std::size_t>(batches),
                                             seed_list);
    const auto opt = dsm::gradient_variance(opt_cfg, net, sigmas, static_cast<std::size_t>(batches),
                                            seed_list);

    CsvWriter csv(out_path(out, g), hash_invocation("gradvar", args, g.seed), g.seed,
                  {"level", "sigma_t", "heuristic_trace", "heuristic_se", "optimal_trace",
                   "optimal_se"});
    for (std::size_t i = 0; i < sigmas.size(); ++i)
        csv.row_int_first(static_cast<long long>(i),
                          {sigmas[i], heur.trace_mean[i], heur.trace_se[i], opt.trace_mean[i],
                           opt.trace_se[i]});
    return kExitOk;
}

// -------------------------------------------------------------- decompose --

int cmd_decompose(const Args& args, const GlobalOpts& g) {
    CLI::App app{"DSM-vs-SM loss gap against the analytic constant"};
    std::string density = "fig1", sigmas_csv = "0.1,0.5,1,5", out = "decompose.csv";
    long n = 1000000;
    app.add_option("--density", density);
    app.add_option("--sigmas", sigmas_csv);
    app.add_option("--n", n);
    app.add_option("--out", out);
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const auto data = mixture_from_spec(density, g);
    CsvWriter csv(out_path(out, g), hash_invocation("decompose", args, g.seed), g.seed,
                  {"sigma", "l_dsm", "l_sm", "gap", "analytic_constant", "rel_error"});
    for (double sigma : parse_double_list(sigmas_csv)) {
        const auto perturbed = data.perturbed(sigma);
        auto score = [&perturbed](double x) { return perturbed.log_density_derivative(x, 1); };
        const auto r = dsm::pythagorean_gap(data, sigma, score, static_cast<std::size_t>(n),
                                            dsm::Rng(dsm::mix_seed(g.seed, dsm::fnv1a("decompose", 9))));
        csv.row({sigma, r.l_dsm, r.l_sm, r.gap, r.analytic_constant,
                 std::abs(r.gap - r.analytic_constant) / std::abs(r.analytic_constant)});
    }
    return kExitOk;
}

// ---------------------------------------------------------------- figures --

namespace {

struct ManifestEntry {
    std::string name;
    std::string command;
    Args args;
};

std::vector<ManifestEntry> parse_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dsm::ConfigError("cannot open manifest: " + path);
    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string name, eq, command;
        if (!(ss >> name)) continue;
        if (!(ss >> eq >> command) || eq != "=")
            throw dsm::ConfigError(path + ":" + std::to_string(lineno) +
                                   ": expected '<name> = <command> <flags...>'");
        ManifestEntry e{name, command, {}};
        std::string tok;
        while (ss >> tok) e.args.push_back(tok);
        for (const auto& prev : entries)
            if (prev.name == e.name)
                throw dsm::ConfigError(path + ": duplicate experiment name '" + e.name + "'");
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace

int cmd_figures(const Args& args, const GlobalOpts& g) {
    CLI::App app{"run every experiment in a manifest"};
    std::string manifest;
    app.add_option("--manifest", manifest)->required();
    if (int rc = parse_or_exit(app, args)) return rc < 0 ? kExitOk : rc;

    const std::string mpath = resolve_input(manifest, g);
    const auto entries = parse_manifest(mpath);
    if (entries.empty()) return kExitOk;

    GlobalOpts base = g;
    base.base_dir = fs::path(mpath).has_parent_path() ? fs::path(mpath).parent_path().string()
                                                      : std::string(".");

    std::atomic<std::size_t> next{0};
    std::mutex io;
    std::vector<std::string> failures;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            const auto& e = entries[i];
            GlobalOpts eg = base;
            eg.seed = dsm::mix_seed(g.seed, dsm::fnv1a(e.name.data(), e.name.size()));
            int rc;
            std::string what;
            try {
                rc = run_command(e.command, e.args, eg);
            } catch (const std::exception& ex) {
                rc = kExitNumeric;
                what = ex.what();
            }
            std::lock_guard<std::mutex> lock(io);
            if (rc != kExitOk) {
                failures.push_back(e.name + (what.empty() ? "" : ": " + what));
                std::cerr << "[figures] FAILED " << e.name << (what.empty() ? "" : ": " + what)
                          << "\n";
            } else {
                std::cout << "[figures] done " << e.name << "\n";
            }
        }
    };

    const int jobs = std::max(1, g.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (!failures.empty()) {
        std::cerr << "[figures] " << failures.size() << "/" << entries.size()
                  << " experiments failed\n";
        return kExitPartial;
    }
    return kExitOk;
}

int run_command(const std::string& name, const Args& args, const GlobalOpts& g) {
    try {
        if (name == "weights") return cmd_weights(args, g);
        if (name == "train") return cmd_train(args, g);
        if (name == "trainsweep") return cmd_trainsweep(args, g);
        if (name == "sample") return cmd_sample(args, g);
        if (name == "estimators") return cmd_estimators(args, g);
        if (name == "gradvar") return cmd_gradvar(args, g);
        if (name == "decompose") return cmd_decompose(args, g);
        if (name == "figures") return cmd_figures(args, g);
        std::cerr << "error: unknown command '" << name << "'\n";
        return kExitConfig;
    } catch (const dsm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dsm::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace dsmcli
