// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded RNG with hand-rolled shuffle/sample so results are identical
// across standard library implementations (std::shuffle and
// std::uniform_int_distribution are not portable bit-for-bit).

#include <cstdint>
#include <random>
#include <vector>

namespace floratag {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(static_cast<std::mt19937_64::result_type>(seed)) {}

    // Unbiased draw from [0, n) by rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), returned in increasing order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        shuffle(pool);
        pool.resize(k < n ? k : n);
        std::vector<bool> chosen(n, false);
        for (auto i : pool) chosen[i] = true;
        std::vector<std::size_t> out;
        out.reserve(pool.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) out.push_back(i);
        }
        return out;
    }

    double uniform() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one value per call (the pair's second half is dropped
    // to keep the draw count predictable).
    double normal(double mean, double stddev) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace floratag
