#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "elicit/elicitation.hpp"

namespace elicit {

struct PolicyConfig {
  Money order_cost = 0.1;        // relative to a value query
  double hint = 0.2;             // time per bound-approximation query
  int samples = 10;              // expected-benefit sample grid
  bool asymmetric_bounds = false;
};

enum class TieBreak { smaller, larger, random };

/// Uniform over every value query not yet asked and not inferable, across all
/// n(2^k - 1) agent/non-empty-bundle pairs.
inline Query random_value_policy(ElicitationState& st) {
  std::vector<Query> pool;
  const Mask size = bundle_count(st.items());
  for (int i = 0; i < st.agents(); ++i)
    for (Mask b = 1; b < size; ++b)
      if (!st.network(i).is_known(b)) pool.push_back(Query::value_query(i, b));
  if (pool.empty()) throw StalledPolicy("no value query left although the run is not done");
  return pool[st.rng().below(pool.size())];
}

/// Random value queries restricted to allocatable (b,i) pairs: pairs still
/// assigned by at least one remaining candidate.
inline Query allocatable_random_policy(ElicitationState& st) {
  std::vector<Query> pool;
  const Mask size = bundle_count(st.items());
  for (int i = 0; i < st.agents(); ++i)
    for (Mask b = 1; b < size; ++b)
      if (st.candidates().alloc_count(i, b) > 0 && !st.network(i).is_known(b))
        pool.push_back(Query::value_query(i, b));
  if (pool.empty()) throw StalledPolicy("no allocatable value query left although not done");
  return pool[st.rng().below(pool.size())];
}

/// Asks the (b,i) pair assigned in the most remaining candidates, skipping
/// inferable pairs. Count ties are broken by bundle size per the tie rule,
/// then by ascending mask and agent.
inline Query counting_policy(ElicitationState& st, TieBreak tie) {
  const Mask size = bundle_count(st.items());
  std::uint32_t best_count = 0;
  int best_size = 0;
  Mask best_mask = 0;
  int best_agent = 0;
  bool have = false;
  std::vector<Query> tied;  // random tie-break pool
  for (int i = 0; i < st.agents(); ++i)
    for (Mask b = 1; b < size; ++b) {
      if (st.network(i).is_known(b)) continue;
      const std::uint32_t count = st.candidates().alloc_count(i, b);
      const int sz = bundle_size(b);
      bool better = false, equal = false;
      if (!have) {
        better = true;
      } else if (count != best_count) {
        better = count > best_count;
      } else if (tie == TieBreak::random) {
        equal = true;
      } else if (sz != best_size) {
        better = tie == TieBreak::smaller ? sz < best_size : sz > best_size;
      } else if (b != best_mask) {
        better = b < best_mask;
      } else {
        better = i < best_agent;
      }
      if (better) {
        have = true;
        best_count = count;
        best_size = sz;
        best_mask = b;
        best_agent = i;
        if (tie == TieBreak::random) {
          tied.clear();
          tied.push_back(Query::value_query(i, b));
        }
      } else if (equal) {
        tied.push_back(Query::value_query(i, b));
      }
    }
  if (!have) throw StalledPolicy("counting policy found no candidate query");
  if (tie == TieBreak::random && tied.size() > 1) return tied[st.rng().below(tied.size())];
  return Query::value_query(best_agent, best_mask);
}

/// First candidate pair (ascending index order) that cannot be ordered, then
/// the first agent whose comparison of the two assigned bundles is neither
/// recorded nor inferable.
inline std::optional<Query> select_order_query(ElicitationState& st) {
  const CandidateSet& cs = st.candidates();
  for (std::uint32_t ci = cs.first_alive(); ci != cs.end(); ci = cs.next_alive(ci))
    for (std::uint32_t cj = cs.next_alive(ci); cj != cs.end(); cj = cs.next_alive(cj)) {
      if (st.dominates_candidate(ci, cj) || st.dominates_candidate(cj, ci)) continue;
      for (int i = 0; i < st.agents(); ++i) {
        const Mask a = cs.bundle_of(ci, i);
        const Mask b = cs.bundle_of(cj, i);
        if (a == b) continue;
        if (st.order_recorded(i, a, b)) continue;
        const BoundsNetwork& net = st.network(i);
        if (net.dominates(a, b) || net.dominates(b, a)) continue;
        return Query::order_query(i, a, b);
      }
    }
  return std::nullopt;
}

/// Alternates order and value turns, order first. Order turns fall back to a
/// value query once no informative comparison remains; value turns use the
/// allocatable-restricted random policy.
inline Query mixed_value_order_policy(ElicitationState& st) {
  if (st.queries_asked() % 2 == 0)
    if (auto q = select_order_query(st)) return *q;
  return allocatable_random_policy(st);
}

/// Bound-approximation query maximizing the expected benefit: assume v is
/// uniform over the proven interval, sample a grid of hypothetical values,
/// compute the bound the agent would return after t more time, propagate it
/// hypothetically, and average the width reduction over bundle-agent pairs
/// still occurring in C. Before anything else, each agent is asked once for
/// an upper bound on the grand bundle so every width is finite.
inline Query expected_benefit_bound_policy(ElicitationState& st, const PolicyConfig& cfg) {
  const Mask grand = grand_bundle(st.items());
  for (int i = 0; i < st.agents(); ++i)
    if (st.hint_issued(i, grand, BoundSide::upper) == 0.0)
      return Query::bound_query(i, grand, BoundSide::upper, cfg.hint);

  const Mask size = bundle_count(st.items());
  Money best_mean = -1.0;
  Query best = Query::value_query(0, 0);
  for (int i = 0; i < st.agents(); ++i)
    for (Mask b = 1; b < size; ++b) {
      if (st.candidates().alloc_count(i, b) == 0) continue;
      const Interval iv = st.network(i).bounds(b);
      if (iv.known()) continue;
      for (BoundSide side : {BoundSide::lower, BoundSide::upper}) {
        const double d = st.hint_issued(i, b, side);
        if (d >= 1.0) continue;
        const double d2 = std::min(1.0, d + cfg.hint);
        Money sum = 0.0;
        for (int s = 1; s <= cfg.samples; ++s) {
          const Money vhat = iv.lb + (s - 0.5) / cfg.samples * (iv.ub - iv.lb);
          Money z;
          if (side == BoundSide::lower)
            z = cfg.asymmetric_bounds ? vhat * d2 : vhat * std::sqrt(d2);
          else
            z = (2.0 - std::sqrt(d2)) * vhat;
          // a returned bound is never less informative than what is proven
          z = std::max(iv.lb, std::min(iv.ub, z));
          if (side == BoundSide::lower ? z > iv.lb : z < iv.ub)
            sum += st.probe_width_reduction(i, b, side, z);
        }
        const Money mean = sum / cfg.samples;
        if (mean > best_mean) {
          best_mean = mean;
          best = Query::bound_query(i, b, side, cfg.hint);
        }
      }
    }
  if (best_mean < 0) throw StalledPolicy("no bound query available although not done");
  return best;
}

/// Alternates order turns and expected-benefit bound turns, order first.
inline Query mixed_bound_order_policy(ElicitationState& st, const PolicyConfig& cfg) {
  if (st.queries_asked() % 2 == 0)
    if (auto q = select_order_query(st)) return *q;
  return expected_benefit_bound_policy(st, cfg);
}

}  // namespace elicit
