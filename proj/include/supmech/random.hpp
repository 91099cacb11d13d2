#pragma once

#include <cstdint>
#include <string_view>

namespace supmech {

/// Deterministic generator (splitmix64). Outputs are identical on every
/// platform, unlike the standard library distributions.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi_inclusive) {
        auto span = static_cast<std::uint64_t>(hi_inclusive - lo + 1);
        return lo + static_cast<int>(next_u64() % span);
    }

   private:
    std::uint64_t state_;
};

/// Stable 64-bit FNV-1a hash, used to derive per-case seeds from names.
inline std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
    Rng mix(seed ^ stable_hash(name));
    return mix.next_u64();
}

}  // namespace supmech
