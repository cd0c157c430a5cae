#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace optimist {

// Seed contract for every randomized component. One (master_seed, stream_id)
// pair names one reproducible random stream; distinct stream_ids under the
// same master seed give statistically independent streams. Parallel code
// hands each worker/replicate its own stream_id and never shares a stream.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    SeedSpec with_stream(std::uint64_t id) const { return {master_seed, id}; }
    SeedSpec offset(std::uint64_t delta) const { return {master_seed, stream_id + delta}; }
};

namespace detail {

// Philox4x64-10 block function (Salmon et al., "Parallel Random Numbers:
// As Easy as 1, 2, 3"). Counter-based: the output is a pure function of
// (counter, key), so streams are addressable and platform-independent at
// the bit level. Verified against the Random123 known-answer vectors.
struct PhiloxBlock {
    std::array<std::uint64_t, 4> words;
};

inline std::uint64_t mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& lo) {
    auto p = static_cast<unsigned __int128>(a) * b;
    lo = static_cast<std::uint64_t>(p);
    return static_cast<std::uint64_t>(p >> 64);
}

inline PhiloxBlock philox4x64_10(std::array<std::uint64_t, 4> ctr,
                                 std::array<std::uint64_t, 2> key) {
    constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

    auto round = [](std::array<std::uint64_t, 4>& c, const std::array<std::uint64_t, 2>& k) {
        std::uint64_t lo0, lo1;
        std::uint64_t hi0 = mulhilo64(M0, c[0], lo0);
        std::uint64_t hi1 = mulhilo64(M1, c[2], lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    };

    for (int i = 0; i < 9; ++i) {
        round(ctr, key);
        key[0] += W0;
        key[1] += W1;
    }
    round(ctr, key);
    return {ctr};
}

}  // namespace detail

// A single owner-per-worker stream of random numbers built on Philox4x64-10.
// The key is (master_seed, stream_id); the counter advances one block per
// four 64-bit draws. The uniform word sequence is bit-identical across
// platforms; derived real-valued draws (gaussian etc.) additionally depend
// on libm rounding, which is stable on a given platform/toolchain.
class RngStream {
public:
    explicit RngStream(SeedSpec spec)
        : key_{spec.master_seed, spec.stream_id}, spec_(spec) {}

    const SeedSpec& spec() const { return spec_; }

    // Next uniform 64-bit word.
    std::uint64_t next_u64() {
        if (buf_pos_ == 4) refill();
        return buf_.words[buf_pos_++];
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Lemire's multiply-shift with rejection;
    // unbiased and deterministic.
    std::uint64_t uniform_below(std::uint64_t n) {
        auto m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via the Marsaglia polar method; caches the paired
    // deviate. Consumes a variable number of words, which is fine because
    // streams are single-owner.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

    // Gamma(alpha, 1) for alpha >= 1 (Marsaglia–Tsang squeeze method).
    double gamma_ge1(double alpha) {
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = gaussian();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Beta(a, b) for a, b >= 1 via two gamma draws.
    double beta(double a, double b) {
        const double ga = gamma_ge1(a);
        const double gb = gamma_ge1(b);
        return ga / (ga + gb);
    }

private:
    void refill() {
        buf_ = detail::philox4x64_10({counter_, 0, 0, 0}, key_);
        ++counter_;
        buf_pos_ = 0;
    }

    std::array<std::uint64_t, 2> key_;
    SeedSpec spec_;
    std::uint64_t counter_ = 0;
    detail::PhiloxBlock buf_{};
    int buf_pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derive a fresh 64-bit master seed from (seed, salt). SplitMix64 finalizer;
// used by the harness to give each replication an independent key space.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace optimist
