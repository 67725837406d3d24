#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "graphnav/geometry.hpp"

namespace graphnav {

/// Deterministic random stream. Uniform doubles and normals are derived from
/// raw mt19937_64 output with fixed arithmetic, so sequences are identical
/// across platforms and standard libraries (std::normal_distribution and
/// friends are implementation-defined and would break reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return gen_() % n;
  }

  /// Standard normal via Box-Muller. Consumes exactly two uniforms per call.
  double normal() {
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;          // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

/// Derives an independent stream seed from a master seed and an operation tag.
/// Every randomized operation in the pipeline draws its stream through this,
/// so a single master seed reproduces the whole run.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return detail::splitmix64(master ^ detail::fnv1a(tag));
}

inline Rng derive_stream(std::uint64_t master, std::string_view tag) {
  return Rng(derive_seed(master, tag));
}

}  // namespace graphnav
