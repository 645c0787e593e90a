#pragma once

#include <cstdint>
#include <vector>

namespace lrtf {

/// Deterministic 64-bit generator (splitmix64). Self-contained so that seeded
/// runs reproduce bit-for-bit regardless of platform or standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n).
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t min = (~n + 1) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < min);
        return x % n;
    }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Independent stream derived from (seed, stream); used for counter-based
    /// per-row and per-subnet seeding so parallel generation stays order-free.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        Rng mixer(seed ^ (0x632BE59BD9B4E019ULL * (stream_id + 1)));
        std::uint64_t s = mixer.next_u64();
        return Rng(s);
    }

private:
    std::uint64_t state_;
};

}  // namespace lrtf
