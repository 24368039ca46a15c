#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace bt {

using StateId = std::int32_t;
using ActionId = std::int32_t;
using EpisodeId = std::uint64_t;
using Rng = std::mt19937_64;

inline constexpr ActionId kNoAction = -1;

// Error taxonomy. The CLI maps ConfigError to exit code 2 and
// IntegrityError to exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform double in [0, 1). Implemented by hand rather than through
// std::uniform_real_distribution so draws are identical across standard
// library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline std::int64_t uniform_index(Rng& rng, std::int64_t n) {
  return static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(n));
}

}  // namespace bt
