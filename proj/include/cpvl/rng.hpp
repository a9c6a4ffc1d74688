#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cpvl {

/// Stream tags keep the randomness of different experiment roles apart even
/// when they share a master seed and replica id.
enum class StreamTag : std::uint64_t {
    simulation = 1,
    event_log = 2,
    dual = 3,
    initial_state = 4,
    bd = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of replica `replica` under `master`: three chained splitmix64
/// rounds over (master, tag, replica). Replicas never share a stream.
constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica,
                                     StreamTag tag = StreamTag::simulation) {
    return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(tag)) ^ replica);
}

/// Per-replica random stream. Only the raw 64-bit engine output is used, so
/// sequences are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t master, std::uint64_t replica, StreamTag tag = StreamTag::simulation)
        : engine_(replica_seed(master, replica, tag)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double hi) { return hi * uniform(); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift with rejection.
        auto x = engine_();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = engine_();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace cpvl
