#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fsnid {

// splitmix64 finalizer; used to derive independent stream seeds from a base
// seed plus salts so parallel estimators never share a stream.
inline uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return mix_seed(a ^ mix_seed(b)); }

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
    return mix_seed(mix_seed(a, b) ^ mix_seed(c));
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
    return mix_seed(mix_seed(a, b, c) ^ mix_seed(d));
}

// Deterministic RNG. mt19937_64 sequencing is fully specified by the
// standard; the distribution transforms below are ours, so identical seeds
// give identical draws everywhere we build.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(mix_seed(seed)) {}

    uint64_t raw() { return gen_(); }

    // uniform in [0, 1)
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // uniform index in [0, n); n must be > 0
    size_t index(size_t n) {
        const uint64_t bound = static_cast<uint64_t>(n);
        uint64_t x = gen_();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        uint64_t lo = static_cast<uint64_t>(m);
        if (lo < bound) {
            const uint64_t threshold = (0ULL - bound) % bound;
            while (lo < threshold) {
                x = gen_();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<size_t>(m >> 64);
    }

    // Box-Muller, no cached spare; two draws per call keeps call order explicit.
    double normal() {
        const double u1 = 1.0 - u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace fsnid
