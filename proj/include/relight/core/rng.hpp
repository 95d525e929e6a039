// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace relight {

// Stateless counter-based random numbers: every value is a pure function of its
// (seed, stream, index, dimension) key, so results never depend on thread scheduling.

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                                        std::uint64_t d = 0) {
    std::uint64_t h = mix64(a + 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ (b + 0x632be59bd9b4e019ull));
    h = mix64(h ^ (c + 0x85ebca77c2b2ae63ull));
    h = mix64(h ^ (d + 0x27d4eb2f165667c5ull));
    return h;
}

// Uniform double in [0,1) from the top 53 bits.
inline constexpr double to_unit(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

inline constexpr double hash_unit(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                                  std::uint64_t d = 0) {
    return to_unit(hash_key(a, b, c, d));
}

struct Sample2 {
    double u, v;
};

// Owen-scrambled Sobol' points in 2D (hash-based nested uniform scrambling after Burley,
// "Practical Hash-based Owen Scrambling", JCGT 2020). Each (seed, stream) pair gets an
// independent scramble; the first 2^m indices always form a (0,m,2)-net.
class OwenSobol2D {
  public:
    OwenSobol2D(std::uint64_t seed, std::uint64_t stream) {
        const std::uint64_t h = hash_key(seed, stream, 0x736f626f6cull);
        index_seed_ = static_cast<std::uint32_t>(h);
        dim_seed_[0] = static_cast<std::uint32_t>(h >> 32);
        dim_seed_[1] = static_cast<std::uint32_t>(hash_key(h, 1));
    }

    Sample2 operator()(std::uint32_t i) const {
        const std::uint32_t index = nested_uniform_scramble(i, index_seed_);
        const std::uint32_t x = nested_uniform_scramble(sobol(index, 0), dim_seed_[0]);
        const std::uint32_t y = nested_uniform_scramble(sobol(index, 1), dim_seed_[1]);
        return {x * 0x1.0p-32, y * 0x1.0p-32};
    }

    static std::uint32_t sobol(std::uint32_t index, int dim) {
        std::uint32_t result = 0;
        std::uint32_t v = 1u << 31;
        for (; index; index >>= 1) {
            if (index & 1) result ^= v;
            // Dimension 0 is van der Corput; dimension 1 uses the x + 1 polynomial.
            v = dim == 0 ? v >> 1 : v ^ (v >> 1);
        }
        return result;
    }

  private:
    static std::uint32_t reverse_bits(std::uint32_t x) {
        x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
        x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
        x = ((x >> 4) & 0x0f0f0f0fu) | ((x & 0x0f0f0f0fu) << 4);
        x = ((x >> 8) & 0x00ff00ffu) | ((x & 0x00ff00ffu) << 8);
        return (x >> 16) | (x << 16);
    }
    static std::uint32_t laine_karras(std::uint32_t x, std::uint32_t seed) {
        x += seed;
        x ^= x * 0x6c50b47cu;
        x ^= x * 0xb82f1e52u;
        x ^= x * 0xc7afe638u;
        x ^= x * 0x8d22f6e6u;
        return x;
    }
    static std::uint32_t nested_uniform_scramble(std::uint32_t x, std::uint32_t seed) {
        return reverse_bits(laine_karras(reverse_bits(x), seed));
    }

    std::uint32_t index_seed_;
    std::uint32_t dim_seed_[2];
};

// Sequential generator for non-rendering uses (dataset lighting draws, tests).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }
    double uniform() { return to_unit(next()); }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * double(n)) % n; }

  private:
    std::uint64_t state_;
};

}  // namespace relight
