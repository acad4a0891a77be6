#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "elicit/bundle.hpp"
#include "elicit/rng.hpp"
#include "elicit/valuation.hpp"

namespace elicit {

struct Allocation {
  std::vector<Mask> bundles;  // one per agent, pairwise disjoint
};

struct OptimalResult {
  Allocation allocation;
  std::int64_t welfare = 0;
};

/// Number of allocations of k items to n agents, guarded by the cap.
inline std::uint64_t allocation_count(int n, int k, std::uint64_t cap = kDefaultCandidateCap) {
  bundle_count(k);
  if (n < 1) throw std::invalid_argument("need at least one agent");
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    total *= static_cast<std::uint64_t>(n);
    if (total > cap)
      throw CapacityError("allocation count " + std::to_string(n) + "^" + std::to_string(k) +
                          " exceeds cap " + std::to_string(cap));
  }
  return total;
}

/// Bundles of allocation index j, where item t goes to agent (j / n^t) % n.
inline void decode_allocation(std::uint64_t j, int n, int k, std::vector<Mask>& out) {
  out.assign(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < k; ++t) {
    out[j % static_cast<std::uint64_t>(n)] |= Mask{1} << t;
    j /= static_cast<std::uint64_t>(n);
  }
}

/// Exhaustive welfare maximization over all n^k allocations. Ties go to the
/// first allocation in enumeration order. This is the ground-truth reference
/// every elicitation run is checked against.
inline OptimalResult brute_force_optimal(const std::vector<TrueValuation>& vals,
                                         std::uint64_t cap = kDefaultCandidateCap) {
  const int n = static_cast<int>(vals.size());
  const int k = vals.empty() ? 0 : vals[0].k;
  for (const TrueValuation& v : vals)
    if (v.k != k) throw std::invalid_argument("mixed item counts");
  const std::uint64_t total = allocation_count(n, k, cap);

  OptimalResult best;
  best.welfare = -1;
  std::vector<Mask> bundles;
  for (std::uint64_t j = 0; j < total; ++j) {
    decode_allocation(j, n, k, bundles);
    std::int64_t w = 0;
    for (int i = 0; i < n; ++i) w += vals[i](bundles[i]);
    if (w > best.welfare) {
      best.welfare = w;
      best.allocation.bundles = bundles;
    }
  }
  return best;
}

inline std::int64_t allocation_welfare(const std::vector<TrueValuation>& vals,
                                       const Allocation& alloc) {
  std::int64_t w = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) w += vals[i](alloc.bundles[i]);
  return w;
}

/// Clarke pivot payments from n+1 winner determinations: each agent pays the
/// welfare the others lose by its presence.
inline std::vector<std::int64_t> clarke_payments(const std::vector<TrueValuation>& vals,
                                                 std::uint64_t cap = kDefaultCandidateCap) {
  const int n = static_cast<int>(vals.size());
  const OptimalResult grand = brute_force_optimal(vals, cap);
  std::vector<std::int64_t> payments(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    std::vector<TrueValuation> rest;
    rest.reserve(vals.size() - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) rest.push_back(vals[j]);
    const std::int64_t without_i = rest.empty() ? 0 : brute_force_optimal(rest, cap).welfare;
    const std::int64_t others_in_grand = grand.welfare - vals[i](grand.allocation.bundles[i]);
    payments[i] = without_i - others_in_grand;
  }
  return payments;
}

/// Expected draws, without replacement, until all r "necessary" balls are out
/// of a bag that also holds b useless ones: e(r,b) = r/(r+1) * (b+r+1).
inline double expected_draws_all_red(int r, int b) {
  if (r < 0 || b < 0) throw std::invalid_argument("counts must be nonnegative");
  if (r == 0) return 0.0;
  return static_cast<double>(r) / (r + 1) * (b + r + 1);
}

/// Expected draws until either the single necessary ball is out or all b
/// useless ones are: e(b) = b(3+b) / (2(1+b)). The ratio b/e(b) never exceeds
/// 2, which caps how much the allocatable restriction can cost.
inline double expected_draws_until_red_or_all_blue(int b) {
  if (b < 1) throw std::invalid_argument("need at least one blue ball");
  return static_cast<double>(b) * (3 + b) / (2.0 * (1 + b));
}

/// Monte-Carlo companions used to validate the closed forms.
inline double simulate_draws_all_red(int r, int b, int trials, Rng& rng) {
  if (r == 0) return 0.0;
  std::uint64_t total = 0;
  for (int t = 0; t < trials; ++t) {
    int red = r, blue = b, draws = 0;
    while (red > 0) {
      ++draws;
      if (rng.below(static_cast<std::uint64_t>(red + blue)) < static_cast<std::uint64_t>(red))
        --red;
      else
        --blue;
    }
    total += static_cast<std::uint64_t>(draws);
  }
  return static_cast<double>(total) / trials;
}

inline double simulate_draws_until_red_or_all_blue(int b, int trials, Rng& rng) {
  std::uint64_t total = 0;
  for (int t = 0; t < trials; ++t) {
    int blue = b, draws = 0;
    while (true) {
      ++draws;
      if (rng.below(static_cast<std::uint64_t>(blue + 1)) == 0) break;  // red drawn
      --blue;
      if (blue == 0) break;
    }
    total += static_cast<std::uint64_t>(draws);
  }
  return static_cast<double>(total) / trials;
}

}  // namespace elicit
