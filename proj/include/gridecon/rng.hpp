#pragma once

#include <cstdint>
#include <string_view>

namespace gridecon::sim {

// Deterministic stream generator, pinned to splitmix64 so identical seeds
// yield identical draws on every platform and build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound); bound 0 yields 0. Modulo reduction, pinned.
    std::uint64_t below(std::uint64_t bound) {
        return bound == 0 ? 0 : next_u64() % bound;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) return lo;
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// FNV-1a, used to derive per-actor substreams from the master seed so the
// set of draws an actor sees does not depend on sibling actors.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline Rng derive_stream(std::uint64_t master_seed, std::string_view actor_id) {
    Rng mix(master_seed ^ fnv1a64(actor_id));
    return Rng(mix.next_u64());
}

}  // namespace gridecon::sim
