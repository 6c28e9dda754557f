#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <system_error>

namespace pgap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Scaled feasibility tolerance shared by the LP solver and the policies.
inline constexpr double kTol = 1e-9;

// Raised when an internal guarantee (e.g. a sampling distribution with mass
// above one) does not hold. Aborts the current trial.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// SplitMix64 finalizer. Used both as a seed mixer and to derive substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Hashes an ordered tuple of integers into one 64-bit seed. The mix is
/// order-sensitive: mix_seed({a, b}) != mix_seed({b, a}) in general.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Thin wrapper over mt19937_64 with a portable uniform draw in [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Shortest round-trip decimal representation, independent of locale.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

inline bool approx_le(double a, double b, double scale = 1.0) {
  return a <= b + kTol * (1.0 + std::abs(scale));
}

}  // namespace pgap
