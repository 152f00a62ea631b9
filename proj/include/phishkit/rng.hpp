#pragma once

#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace phishkit {

// Every randomized operation in this project draws from this generator, seeded
// explicitly with a 64-bit value. std::mt19937_64 has a standard-mandated
// output sequence, so the raw stream is identical on every platform and
// compiler. The standard leaves std::shuffle and the distribution adaptors
// implementation-defined, which is why bounded draws and shuffling are done
// here by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased integer in [0, n) via rejection sampling. n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) using the top 53 bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Fisher-Yates, iterating from the back. One below() call per step.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // First k entries of a partial Fisher-Yates shuffle of 0..n-1: a uniform
    // sample without replacement, in draw order. O(n) memory.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    // Floyd's k-subset sampler: uniform k distinct values from 0..n-1 in O(k)
    // memory, exactly k below() calls. Used where n is large and k small.
    std::vector<std::uint32_t> sample_distinct_u32(std::uint32_t n, std::uint32_t k);

private:
    std::mt19937_64 gen_;
};

// Derives an independent stream seed from a master seed and an index using the
// splitmix64 finalizer. Used for per-tree forest seeds and named sub-streams,
// so the derived streams do not depend on draw order elsewhere.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

inline std::vector<std::uint32_t> Rng::sample_distinct_u32(std::uint32_t n, std::uint32_t k) {
    if (k > n) k = n;
    std::vector<std::uint32_t> out;
    out.reserve(k);
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(k * 2);
    for (std::uint32_t j = n - k; j < n; ++j) {
        auto t = static_cast<std::uint32_t>(below(j + 1));
        if (!chosen.insert(t).second) {
            chosen.insert(j);
            out.push_back(j);
        } else {
            out.push_back(t);
        }
    }
    return out;
}

} // namespace phishkit
