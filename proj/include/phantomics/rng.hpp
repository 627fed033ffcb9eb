#pragma once

// Deterministic random number utilities.
//
// Every stochastic step in this library draws from an explicit Rng seeded
// through derive_seed(), so identical inputs give bit-identical outputs on
// any platform. Standard-library distributions are avoided on purpose:
// their output sequences are implementation defined.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace phantomics {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// One-shot avalanche of a single 64-bit value.
inline std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(s);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace detail {
inline void seed_fold(std::uint64_t& h, std::uint64_t v) {
    h = mix64(h ^ mix64(v));
}
inline void seed_part(std::uint64_t& h, std::uint64_t v) { seed_fold(h, v); }
inline void seed_part(std::uint64_t& h, std::int64_t v) { seed_fold(h, static_cast<std::uint64_t>(v)); }
inline void seed_part(std::uint64_t& h, int v) { seed_fold(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
inline void seed_part(std::uint64_t& h, std::string_view v) { seed_fold(h, fnv1a64(v)); }
inline void seed_part(std::uint64_t& h, const char* v) { seed_fold(h, fnv1a64(v)); }
}  // namespace detail

// Derives a child seed from a root seed and a sequence of labels. Used to
// give every independent random stream (noise, jitter, observer flips, ...)
// its own stable seed.
template <class... Parts>
std::uint64_t derive_seed(std::uint64_t root, Parts&&... parts) {
    std::uint64_t h = mix64(root ^ 0x6a09e667f3bcc909ull);
    (detail::seed_part(h, std::forward<Parts>(parts)), ...);
    return h;
}

// Splitmix64 generator with uniform/normal helpers. Small state, cheap to
// copy, never shared across logical streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased-enough integer in [0, n) via 128-bit multiply.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the second deviate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Fisher-Yates shuffle driven by this generator.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Hash a voxel-level decision to a uniform in [0, 1). Keyed by value, not by
// iteration order, so consumers stay order independent.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t s = mix64(seed ^ mix64(key ^ 0x9e3779b97f4a7c15ull));
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

}  // namespace phantomics
