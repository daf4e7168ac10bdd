// Timing comparison between the OpenMP kernels and their serial references.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "dsm/gaussian_mixture.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/rng.hpp"
#include "dsm/sampling.hpp"
#include "dsm/score_estimators.hpp"
#include "dsm/training.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
    const dsm::GaussianMixture1D fig1{
        {{0.3258, 0.0, 0.5063}, {0.3316, 2.0, 0.7782}, {0.3426, 4.0, 0.0985}}};
    const dsm::NoiseSchedule sched(0.01, 50.0);

    {
        std::vector<double> a(20000), b(20000);
        dsm::Rng rng(1);
        for (double& v : a) v = rng.normal();
        for (double& v : b) v = rng.normal() + 0.5;
        const double fast = time_ms([&] { dsm::energy_distance(a, b); }, 20);
        const double slow = time_ms([&] { dsm::energy_distance_serial(a, b); }, 3);
        report("energy_distance n=20k", slow, fast);
    }

    {
        dsm::SamplerConfig cfg{200, 0.0, 2000};
        const auto fn = dsm::analytic_score_fn(fig1);
        const double fast =
            time_ms([&] { dsm::reverse_sde_sample(fn, sched, cfg, dsm::Rng(7)); }, 3);
        const double slow =
            time_ms([&] { dsm::reverse_sde_sample_serial(fn, sched, cfg, dsm::Rng(7)); }, 3);
        report("reverse_sde 2k x 200", slow, fast);
    }

    {
        const auto spec = dsm::QuadratureSpec::for_mixture(fig1.perturbed(0.5));
        auto f = [&](double x) {
            const double s = fig1.perturbed_score(x, 0.5);
            return s * s;
        };
        const double fast = time_ms([&] { dsm::simpson_integrate(f, spec); }, 10);
        const double slow = time_ms([&] { dsm::simpson_integrate_serial(f, spec); }, 10);
        report("simpson 20001 pts", slow, fast);
    }

    {
        const double fast = time_ms(
            [&] { dsm::estimate_score_mc(fig1, 0.5, 2.0, 2, 200000, dsm::Rng(3)); }, 3);
        std::printf("%-28s %41s %9.2f ms\n", "estimate_score_mc n=200k", "", fast);
    }
    return 0;
}
