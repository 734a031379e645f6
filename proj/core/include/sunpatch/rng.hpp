#ifndef SUNPATCH_RNG_HPP
#define SUNPATCH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace sunpatch {

/// SplitMix64 finalizer. Used both as the generator step and to derive
/// independent child seeds from (seed, salt) pairs, so that results of
/// parallel loops never depend on execution order.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

/// Small deterministic PRNG (SplitMix64 stream). We avoid std:: distributions
/// on purpose: their outputs are implementation-defined, which would break
/// byte-reproducibility of seeded pipelines across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps it
    /// exactly uniform.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (pairs cached).
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    /// k distinct indices out of [0, n), by partial Fisher-Yates. Order of the
    /// returned indices is the draw order (callers sort if they need to).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        scratch_.resize(n);
        for (std::size_t i = 0; i < n; ++i) scratch_[i] = i;
        std::vector<std::size_t> out(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(scratch_[i], scratch_[j]);
            out[i] = scratch_[i];
        }
        return out;
    }

private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
    std::vector<std::size_t> scratch_;
};

} // namespace sunpatch

#endif
