#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace confaudit {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent substream seed from a base seed and integer tags.
// Used everywhere a (seed, repeat, fold, ...) tuple must map to its own
// stream so that results do not depend on scheduling or worker count.
template <class... Tags>
std::uint64_t derive_seed(std::uint64_t base, Tags... tags) {
    std::uint64_t h = splitmix64(base);
    ((h = splitmix64(h ^ static_cast<std::uint64_t>(tags))), ...);
    return h;
}

// Tag constants for derive_seed so substreams never collide by accident.
namespace seedtag {
inline constexpr std::uint64_t folds = 0x01;
inline constexpr std::uint64_t shuffle = 0x02;
inline constexpr std::uint64_t swap = 0x03;
inline constexpr std::uint64_t tree = 0x04;
inline constexpr std::uint64_t model = 0x05;
inline constexpr std::uint64_t split = 0x06;
inline constexpr std::uint64_t balance = 0x07;
inline constexpr std::uint64_t confound = 0x08;
inline constexpr std::uint64_t retry = 0x09;
}  // namespace seedtag

// Deterministic RNG with hand-rolled distributions. std:: distributions are
// not pinned across standard libraries, and the generators here must be
// byte-reproducible, so the few transforms needed are implemented directly.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire's multiply-shift; the O(n/2^64)
    // bias is irrelevant here, determinism is what matters.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

    // Box-Muller, no spare caching: every call consumes exactly two draws.
    double normal(double mean = 0.0, double sd = 1.0) {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        return mean + sd * z;
    }

    // Chi-squared with integer df as a sum of squared standard normals.
    double chi2(int df) {
        double s = 0.0;
        for (int i = 0; i < df; ++i) {
            const double z = normal();
            s += z * z;
        }
        return s;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    std::vector<int> permutation(int n) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        shuffle(idx);
        return idx;
    }

    // k distinct values from [0, n) in selection order.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < k; ++i) {
            const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(k));
        return idx;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace confaudit
