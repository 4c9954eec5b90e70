#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hbar {

/// Raised for invalid input or violated preconditions. Messages name the
/// offending item (generator, field, parameter) so the CLI can report them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using P2 = std::array<double, 2>;

/// Selects the serial reference path or the OpenMP kernel. Both must
/// produce bitwise identical results.
enum class Exec { Serial, Parallel };

/// Deterministic 64-bit generator (SplitMix64 seeding into xoshiro256**).
/// Named substreams make every random draw a pure function of
/// (seed, name, index), independent of thread scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t s_[4];
};

std::uint64_t hash_name(std::string_view name);

}  // namespace hbar
