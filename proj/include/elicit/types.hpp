#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace elicit {

// A bundle is a subset of the k items, encoded as a bit mask with item i at
// bit i. All tables indexed by bundle use the mask as the index.
using Mask = std::uint32_t;

// Dollar amounts. +infinity marks "no upper bound proven yet".
using Money = double;

inline constexpr int kMaxItems = 16;
inline constexpr Money kMaxBid = 1.0e7;
inline constexpr Money kInf = std::numeric_limits<Money>::infinity();
inline constexpr std::uint64_t kDefaultCandidateCap = 1'000'000;

// Requested table size exceeds the desk-scale caps (2^k bundles, n^k candidates).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An answer contradicts bounds already proven. Agents are truthful by
// construction, so this signals a bug rather than a lying bidder.
struct InconsistentAnswer : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A policy produced no query even though the run is not done.
struct StalledPolicy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace elicit
