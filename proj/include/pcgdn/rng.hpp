#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pcgdn {

// Seeded random source. std::mt19937_64 is fully specified by the standard,
// but the std distributions are not, so the distributions here are hand
// rolled to keep generated datasets reproducible across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n = 0 returns 0.
    uint64_t uniform_index(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller with a cached spare.
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

    double log_normal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    // Knuth's product method, split so large rates stay exact
    // (a sum of independent Poissons is Poisson).
    int64_t poisson(double lambda) {
        int64_t total = 0;
        while (lambda > 20.0) {
            total += poisson_small(20.0);
            lambda -= 20.0;
        }
        return total + poisson_small(lambda);
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    int64_t poisson_small(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        int64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

// Stable child-seed derivation: (master, key, index) -> seed. Used so every
// synthesized variant owns an independent stream regardless of work order.
inline uint64_t derive_seed(uint64_t master, std::string_view key, uint64_t index = 0) {
    uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a over the key
    for (const char c : key) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    uint64_t state = master;
    uint64_t seed = detail::splitmix64(state);
    state = seed ^ h;
    seed = detail::splitmix64(state);
    state = seed + index;
    return detail::splitmix64(state);
}

} // namespace pcgdn
