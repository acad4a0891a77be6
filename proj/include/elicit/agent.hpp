#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "elicit/valuation.hpp"

namespace elicit {

enum class BoundSide { lower, upper };

enum class OrderAnswer { first, second, both };  // a >= b, b >= a, equal

struct CostModel {
  Money value_cost = 1.0;
  Money order_cost = 0.1;
  // Robustness variant: lower bounds improve linearly in d instead of sqrt(d).
  bool asymmetric_bounds = false;
};

struct QueryLedger {
  std::uint64_t value_queries = 0;
  std::uint64_t rank_queries = 0;  // not charged, counted for reporting
  std::uint64_t order_queries = 0;
  std::uint64_t bound_queries = 0;
  Money bound_time = 0.0;  // sum of hints
  Money total_cost = 0.0;

  QueryLedger& operator+=(const QueryLedger& o) {
    value_queries += o.value_queries;
    rank_queries += o.rank_queries;
    order_queries += o.order_queries;
    bound_queries += o.bound_queries;
    bound_time += o.bound_time;
    total_cost += o.total_cost;
    return *this;
  }
};

/// A truthful simulated bidder. Holds the hidden valuation, the derived rank
/// order, and the anytime-computation state for bound queries, and charges a
/// ledger per answered query.
///
/// Bound answers model two restartable anytime algorithms: after cumulative
/// time d in [0,1] on a bundle, the lower-bound algorithm reports v*sqrt(d)
/// and the upper-bound one (2-sqrt(d))*v, so both become tight at d = 1.
class SimulatedAgent {
 public:
  explicit SimulatedAgent(TrueValuation truth, CostModel cost = {})
      : truth_(std::move(truth)),
        cost_(cost),
        d_lower_(truth_.value.size(), 0.0),
        d_upper_(truth_.value.size(), 0.0) {
    // rank 1 is the most preferred bundle; ties rank larger bundles first,
    // equal sizes by ascending mask. This keeps the grand bundle at rank 1
    // and the empty bundle at rank 2^k.
    rank_order_.resize(truth_.value.size());
    std::iota(rank_order_.begin(), rank_order_.end(), Mask{0});
    std::sort(rank_order_.begin(), rank_order_.end(), [&](Mask a, Mask b) {
      if (truth_.value[a] != truth_.value[b]) return truth_.value[a] > truth_.value[b];
      if (bundle_size(a) != bundle_size(b)) return bundle_size(a) > bundle_size(b);
      return a < b;
    });
  }

  int items() const { return truth_.k; }
  const TrueValuation& truth() const { return truth_; }
  const QueryLedger& ledger() const { return ledger_; }

  Money answer_value(Mask b) {
    ++ledger_.value_queries;
    ledger_.total_cost += cost_.value_cost;
    return static_cast<Money>(truth_.value[b]);
  }

  Mask answer_rank(std::uint32_t r) {
    if (r < 1 || r > rank_order_.size())
      throw std::out_of_range("rank " + std::to_string(r) + " outside 1.." +
                              std::to_string(rank_order_.size()));
    ++ledger_.rank_queries;
    return rank_order_[r - 1];
  }

  OrderAnswer answer_order(Mask a, Mask b) {
    ++ledger_.order_queries;
    ledger_.total_cost += cost_.order_cost;
    if (truth_.value[a] > truth_.value[b]) return OrderAnswer::first;
    if (truth_.value[a] < truth_.value[b]) return OrderAnswer::second;
    return OrderAnswer::both;
  }

  /// Spends t more time tightening the requested bound on b and reports the
  /// refined bound. Unrounded, so the elicitor cannot exploit integrality.
  Money answer_bound(Mask b, BoundSide side, double t) {
    if (!(t > 0)) throw std::invalid_argument("bound-approximation hint must be positive");
    ++ledger_.bound_queries;
    ledger_.bound_time += t;
    ledger_.total_cost += t;
    const Money v = static_cast<Money>(truth_.value[b]);
    if (side == BoundSide::lower) {
      double& d = d_lower_[b];
      d = std::min(1.0, d + t);
      return cost_.asymmetric_bounds ? v * d : v * std::sqrt(d);
    }
    double& d = d_upper_[b];
    d = std::min(1.0, d + t);
    return (2.0 - std::sqrt(d)) * v;
  }

  double bound_progress(Mask b, BoundSide side) const {
    return side == BoundSide::lower ? d_lower_[b] : d_upper_[b];
  }

 private:
  TrueValuation truth_;
  CostModel cost_;
  std::vector<Mask> rank_order_;
  std::vector<double> d_lower_;
  std::vector<double> d_upper_;
  QueryLedger ledger_;
};

/// Agents for one auction instance, sharing a cost model.
inline std::vector<SimulatedAgent> make_agents(const std::vector<TrueValuation>& truths,
                                               CostModel cost = {}) {
  std::vector<SimulatedAgent> agents;
  agents.reserve(truths.size());
  for (const TrueValuation& t : truths) agents.emplace_back(t, cost);
  return agents;
}

}  // namespace elicit
