#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "elicit/types.hpp"

namespace elicit {

/// Number of bundles over k items (2^k). Guards the desk-scale cap.
inline std::uint32_t bundle_count(int k) {
  if (k < 0 || k > kMaxItems)
    throw CapacityError("item count " + std::to_string(k) + " outside supported range 0.." +
                        std::to_string(kMaxItems));
  return std::uint32_t{1} << k;
}

inline Mask grand_bundle(int k) { return static_cast<Mask>(bundle_count(k) - 1); }

inline bool is_subset(Mask a, Mask b) { return (a & ~b) == 0; }

inline bool is_strict_subset(Mask a, Mask b) { return a != b && is_subset(a, b); }

inline bool disjoint(Mask a, Mask b) { return (a & b) == 0; }

inline int bundle_size(Mask b) { return std::popcount(b); }

/// All 2^k bundles in ascending mask order (the canonical enumeration order).
inline std::vector<Mask> all_bundles(int k) {
  std::vector<Mask> out(bundle_count(k));
  for (Mask b = 0; b < out.size(); ++b) out[b] = b;
  return out;
}

struct FreeDisposalEdge {
  Mask super;
  Mask sub;
};

/// One edge from each bundle to every bundle obtained by removing exactly one
/// item. Transitivity of these edges spans the whole strict-subset relation,
/// so k*2^(k-1) edges suffice instead of one edge per subset pair.
inline std::vector<FreeDisposalEdge> free_disposal_edges(int k) {
  std::vector<FreeDisposalEdge> out;
  const Mask count = bundle_count(k);
  if (k > 0) out.reserve(static_cast<std::size_t>(k) << (k - 1));
  for (Mask b = 0; b < count; ++b)
    for (Mask items = b; items != 0; items &= items - 1) {
      const Mask bit = items & (0u - items);
      out.push_back({b, static_cast<Mask>(b ^ bit)});
    }
  return out;
}

/// Diagnostic count (3^k - 1) / 2 of dominance relations.
inline std::uint64_t dominance_pair_count(int k) {
  bundle_count(k);  // range guard
  std::uint64_t p = 1;
  for (int i = 0; i < k; ++i) p *= 3;
  return (p - 1) / 2;
}

/// "{0,2}" style rendering; the empty bundle prints as "{}".
inline std::string bundle_to_string(Mask b) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < kMaxItems; ++i)
    if (b & (Mask{1} << i)) {
      if (!first) s += ',';
      s += std::to_string(i);
      first = false;
    }
  s += '}';
  return s;
}

}  // namespace elicit
