#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flow {

using Nat = std::uint64_t;
using NodeId = std::string;

/// Malformed or out-of-contract input (unknown node, wrong value kind,
/// unparseable file, violated precondition).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation requested on a domain that does not support it (e.g. symbolic
/// composition of max-based edges, capacity over a non-ScaleVec domain).
struct CapabilityError : std::runtime_error {
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured search or enumeration bound was exceeded.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An executable model broke one of its own guarantees (step budget
/// exhausted, invariant check failed mid-run). Indicates a model bug, not
/// bad input.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic 64-bit stream used everywhere randomness is needed.
/// splitmix64; stable across platforms and runs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform value in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Uniform value in [lo, hi].
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    /// Independent substream; used to derive per-case and per-thread seeds.
    Rng fork(std::uint64_t salt) { return Rng(next() ^ (salt * 0x9e3779b97f4a7c15ull)); }

  private:
    std::uint64_t state_;
};

/// FNV-1a over bytes; stable digest for trace records.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace flow
