#pragma once
#include <cstddef>
#include <vector>

namespace dsm {

// Deterministic chunked parallel reduction: the index range is cut into fixed
// blocks, block results are stored by block index and merged serially, so the
// result does not depend on the number of threads (only on the block size).
template <class F>
double chunked_sum(std::size_t n, std::size_t block, F&& body) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = lo + block < n ? lo + block : n;
        partial[static_cast<std::size_t>(b)] = body(lo, hi);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

// Two accumulators in one sweep (e.g. sum and sum of squares).
template <class F>
void chunked_sum2(std::size_t n, std::size_t block, F&& body, double& out_a, double& out_b) {
    out_a = 0.0;
    out_b = 0.0;
    if (n == 0) return;
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> pa(nblocks, 0.0), pb(nblocks, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = lo + block < n ? lo + block : n;
        body(lo, hi, pa[static_cast<std::size_t>(b)], pb[static_cast<std::size_t>(b)]);
    }
    for (std::size_t i = 0; i < nblocks; ++i) {
        out_a += pa[i];
        out_b += pb[i];
    }
}

}  // namespace dsm
