#pragma once
#include <array>
#include <cmath>
#include <cstdint>

namespace dsm {

// splitmix64 step; also the workhorse behind seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Combine a parent key with a stream id into a well-mixed child key.
inline std::uint64_t mix_seed(std::uint64_t key, std::uint64_t id) {
    std::uint64_t s = key ^ (0x9e3779b97f4a7c15ULL + (id << 1) + (id >> 3));
    std::uint64_t r = splitmix64(s);
    r ^= splitmix64(s);
    return r;
}

// FNV-1a, used to fold run names into seed material and to hash configs.
inline std::uint64_t fnv1a(const char* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256++ with an explicit key kept around so independent substreams can
// be split off deterministically (split() does not consume generator state).
// Normal draws use Box-Muller with a cached spare. The generator is written
// out in full rather than delegating to <random> so that sequences are
// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Independent substream; deterministic in (key, id) only.
    Rng split(std::uint64_t id) const { return Rng(mix_seed(key_, id)); }

    std::uint64_t key() const { return key_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t key_;
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dsm
