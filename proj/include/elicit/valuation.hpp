#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "elicit/bounds_network.hpp"
#include "elicit/bundle.hpp"
#include "elicit/rng.hpp"

namespace elicit {

/// An agent's hidden valuation table: integer dollars per bundle, v({}) = 0,
/// monotone under the subset order (free disposal), bounded by kMaxBid.
struct TrueValuation {
  int k = 0;
  std::vector<std::int64_t> value;  // indexed by mask

  std::int64_t operator()(Mask b) const { return value[b]; }

  bool free_disposal_ok() const {
    for (Mask b = 0; b < value.size(); ++b)
      for (Mask items = b; items != 0; items &= items - 1)
        if (value[b ^ (items & (0u - items))] > value[b]) return false;
    return true;
  }
};

/// Benchmark generator: assigns values to non-empty bundles in uniformly
/// random order, each drawn uniformly (integer, inclusive) from the interval
/// the constraint network currently allows, then propagated as exact. The
/// grand bundle is capped at kMaxBid up front, so every draw is finite and the
/// result honors free disposal by construction. Nearly every bundle ends up
/// with a nonzero value and the tables show both complementarity and
/// substitutability.
inline TrueValuation generate_bids(int k, Rng& rng) {
  TrueValuation out;
  out.k = k;
  out.value.assign(bundle_count(k), 0);
  if (k == 0) return out;

  BoundsNetwork net(k, /*pin_empty=*/true);
  net.tighten_upper(grand_bundle(k), kMaxBid);

  std::vector<Mask> pending;
  pending.reserve(out.value.size() - 1);
  for (Mask b = 1; b < out.value.size(); ++b) pending.push_back(b);

  while (!pending.empty()) {
    const std::size_t j = static_cast<std::size_t>(rng.below(pending.size()));
    const Mask b = pending[j];
    pending[j] = pending.back();
    pending.pop_back();

    const Interval& iv = net.bounds(b);
    // bounds stay integral while only integer values are propagated
    const std::int64_t v = rng.int_in(std::llround(iv.lb), std::llround(iv.ub));
    net.set_value(b, static_cast<Money>(v));
    out.value[b] = v;
  }
  return out;
}

}  // namespace elicit
