#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "elicit/agent.hpp"
#include "elicit/bounds_network.hpp"
#include "elicit/bundle.hpp"
#include "elicit/oracle.hpp"
#include "elicit/rng.hpp"

namespace elicit {

struct Query {
  enum class Kind { value, order, bound };
  Kind kind = Kind::value;
  int agent = 0;
  Mask bundle = 0;  // value/bound target, or the first order bundle
  Mask other = 0;   // second order bundle
  BoundSide side = BoundSide::lower;
  double hint = 0.0;

  static Query value_query(int agent, Mask b) { return {Kind::value, agent, b, 0, BoundSide::lower, 0.0}; }
  static Query order_query(int agent, Mask a, Mask b) { return {Kind::order, agent, a, b, BoundSide::lower, 0.0}; }
  static Query bound_query(int agent, Mask b, BoundSide side, double t) {
    return {Kind::bound, agent, b, 0, side, t};
  }
};

/// Explicit store of the remaining feasible allocations. Every one of the n^k
/// assignments of all k items to the n agents is a candidate; removal is
/// permanent. Per-(agent,bundle) counts answer allocatability queries, and the
/// holder lists say which candidates an interval change touches.
class CandidateSet {
 public:
  CandidateSet(int n, int k, std::uint64_t cap = kDefaultCandidateCap, int excluded_agent = -1)
      : n_(n), k_(k), size_(bundle_count(k)) {
    const int base = excluded_agent >= 0 ? n - 1 : n;
    if (base < 1) throw std::invalid_argument("need at least one eligible agent");
    std::uint64_t total = 1;
    for (int i = 0; i < k; ++i) {
      total *= static_cast<std::uint64_t>(base);
      if (total > cap)
        throw CapacityError("candidate count " + std::to_string(base) + "^" + std::to_string(k) +
                            " exceeds cap " + std::to_string(cap));
    }
    total_ = static_cast<std::uint32_t>(total);
    alive_count_ = total_;
    bundles_.assign(static_cast<std::size_t>(total_) * n_, 0);
    alive_.assign(total_, 1);
    next_.resize(total_ + 1);
    prev_.resize(total_ + 1);
    for (std::uint32_t i = 0; i <= total_; ++i) {
      next_[i] = i + 1;
      prev_[i] = i == 0 ? total_ : i - 1;
    }
    head_ = total_ == 0 ? total_ : 0;

    alloc_count_.assign(static_cast<std::size_t>(n_) * size_, 0);
    holders_.resize(static_cast<std::size_t>(n_) * size_);
    for (std::uint32_t idx = 0; idx < total_; ++idx) {
      Mask* row = &bundles_[static_cast<std::size_t>(idx) * n_];
      std::uint64_t j = idx;
      for (int t = 0; t < k_; ++t) {
        int d = static_cast<int>(j % base);
        j /= base;
        if (excluded_agent >= 0 && d >= excluded_agent) ++d;
        row[d] |= Mask{1} << t;
      }
      for (int a = 0; a < n_; ++a) {
        ++alloc_count_[slot(a, row[a])];
        holders_[slot(a, row[a])].push_back(idx);
      }
    }
  }

  int agents() const { return n_; }
  int items() const { return k_; }
  std::uint32_t total() const { return total_; }
  std::uint32_t alive_count() const { return alive_count_; }
  bool alive(std::uint32_t idx) const { return alive_[idx] != 0; }
  Mask bundle_of(std::uint32_t idx, int agent) const {
    return bundles_[static_cast<std::size_t>(idx) * n_ + agent];
  }
  std::vector<Mask> candidate(std::uint32_t idx) const {
    const Mask* row = &bundles_[static_cast<std::size_t>(idx) * n_];
    return std::vector<Mask>(row, row + n_);
  }
  std::uint32_t first_alive() const { return head_; }
  std::uint32_t next_alive(std::uint32_t idx) const { return next_[idx]; }
  std::uint32_t end() const { return total_; }

  std::uint32_t alloc_count(int agent, Mask b) const { return alloc_count_[slot(agent, b)]; }
  const std::vector<std::uint32_t>& holders(int agent, Mask b) const { return holders_[slot(agent, b)]; }

  void remove(std::uint32_t idx) {
    alive_[idx] = 0;
    --alive_count_;
    const std::uint32_t p = prev_[idx], nx = next_[idx];
    if (idx == head_)
      head_ = nx;
    else
      next_[p] = nx;
    prev_[nx] = p;
    const Mask* row = &bundles_[static_cast<std::size_t>(idx) * n_];
    for (int a = 0; a < n_; ++a) --alloc_count_[slot(a, row[a])];
  }

 private:
  std::size_t slot(int agent, Mask b) const { return static_cast<std::size_t>(agent) * size_ + b; }

  int n_;
  int k_;
  Mask size_;
  std::uint32_t total_ = 0;
  std::uint32_t alive_count_ = 0;
  std::uint32_t head_ = 0;
  std::vector<Mask> bundles_;
  std::vector<std::uint8_t> alive_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> prev_;
  std::vector<std::uint32_t> alloc_count_;
  std::vector<std::vector<std::uint32_t>> holders_;
};

/// Shared answers across the n+1 marginal-economy runs of an elicited Clarke
/// computation. A hit answers from the cache and charges nothing.
struct AnswerCache {
  std::vector<std::unordered_map<Mask, Money>> values;
  std::vector<std::unordered_map<std::uint64_t, OrderAnswer>> orders;
  std::uint64_t hits = 0;

  void ensure(int n) {
    if (static_cast<int>(values.size()) < n) values.resize(n);
    if (static_cast<int>(orders.size()) < n) orders.resize(n);
  }
};

struct StateOptions {
  std::uint64_t candidate_cap = kDefaultCandidateCap;
  bool strict_domination = false;
  int excluded_agent = -1;       // that agent's bundle is forced empty
  AnswerCache* cache = nullptr;  // optional shared answer cache
  std::ostream* trace = nullptr; // line-per-query run trace
};

/// Elicitor-side state of one run: candidate set, one bounds network per
/// agent, recorded order answers, issued bound hints, and the query counter.
/// Pruning is incremental; interval changes mark the candidates they might
/// newly dominate or newly be dominated through, and only those are
/// re-examined. The result is identical to rescanning every pair because
/// domination proofs are monotone in the bounds.
class ElicitationState {
 public:
  ElicitationState(int n, int k, std::uint64_t seed, StateOptions opts = {})
      : opts_(opts),
        candidates_(n, k, opts.candidate_cap, opts.excluded_agent),
        rng_(seed),
        order_seen_(static_cast<std::size_t>(n)),
        dominatee_dirty_(candidates_.total(), 0),
        dominator_dirty_(candidates_.total(), 0) {
    networks_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) networks_.emplace_back(k, /*pin_empty=*/true);
    if (opts_.cache) opts_.cache->ensure(n);
    const Mask size = bundle_count(k);
    hint_lower_.assign(static_cast<std::size_t>(n) * size, 0.0);
    hint_upper_.assign(static_cast<std::size_t>(n) * size, 0.0);

    lbsum_.assign(candidates_.total(), 0.0);
    ubsum_fin_.assign(candidates_.total(), 0.0);
    inf_count_.assign(candidates_.total(), 0);
    unknown_count_.assign(candidates_.total(), 0);
    for (std::uint32_t c = 0; c < candidates_.total(); ++c)
      for (int i = 0; i < n; ++i)
        if (candidates_.bundle_of(c, i) != 0) {
          ++inf_count_[c];
          ++unknown_count_[c];
        }
  }

  int agents() const { return candidates_.agents(); }
  int items() const { return candidates_.items(); }
  const CandidateSet& candidates() const { return candidates_; }
  const BoundsNetwork& network(int i) const { return networks_[i]; }
  Rng& rng() { return rng_; }
  std::uint64_t queries_asked() const { return queries_asked_; }
  bool strict_domination() const { return opts_.strict_domination; }

  Money candidate_lb(std::uint32_t idx) const { return lbsum_[idx]; }
  Money candidate_ub(std::uint32_t idx) const { return inf_count_[idx] ? kInf : ubsum_fin_[idx]; }
  bool candidate_known(std::uint32_t idx) const { return unknown_count_[idx] == 0; }

  bool order_recorded(int i, Mask a, Mask b) const {
    return order_seen_[i].count(order_key(a, b)) != 0;
  }

  double hint_issued(int i, Mask b, BoundSide side) const {
    const auto& rec = side == BoundSide::lower ? hint_lower_ : hint_upper_;
    return rec[hint_slot(i, b)];
  }

  /// Proven-value comparison of candidates: the bounds separate outright, or
  /// per-agent dominance covers the gap. Agents whose dominance is proven by
  /// an edge path are exempt from the sum; proven bound margins, positive or
  /// required, are accumulated. Weak by default; strict mode demands a
  /// strictly positive margin.
  bool dominates_candidate(std::uint32_t cd, std::uint32_t cc) const {
    Money margin = 0.0;
    for (int j = 0; j < agents(); ++j) {
      const Mask a = candidates_.bundle_of(cd, j);
      const Mask b = candidates_.bundle_of(cc, j);
      const BoundsNetwork& net = networks_[j];
      const Money gap = net.lb(a) - net.ub(b);  // -inf when ub(b) is open
      if (net.dominates(a, b)) {
        if (gap > 0) margin += gap;
      } else {
        if (net.ub(b) == kInf) return false;
        margin += gap;
      }
    }
    return opts_.strict_domination ? margin > 0 : margin >= 0;
  }

  bool done() const {
    if (candidates_.alive_count() <= 1) return true;
    for (std::uint32_t c = candidates_.first_alive(); c != candidates_.end();
         c = candidates_.next_alive(c))
      if (unknown_count_[c] != 0) return false;
    return true;
  }

  /// Removes, one candidate at a time in ascending index order, every
  /// candidate dominated by a still-remaining one. Weak domination may drop
  /// optimal allocations, but never the last one.
  void prune() {
    const std::uint32_t end = candidates_.end();
    std::uint32_t c = candidates_.first_alive();
    while (c != end) {
      const std::uint32_t next = candidates_.next_alive(c);
      bool doomed = false;
      if (full_scan_ || dominatee_dirty_[c]) {
        for (std::uint32_t d = candidates_.first_alive(); d != end; d = candidates_.next_alive(d)) {
          if (d == c) continue;
          if (dominates_candidate(d, c)) {
            doomed = true;
            break;
          }
        }
      } else {
        for (std::uint32_t d : dominator_dirty_list_) {
          if (d == c || !candidates_.alive(d)) continue;
          if (dominates_candidate(d, c)) {
            doomed = true;
            break;
          }
        }
      }
      if (doomed) candidates_.remove(c);
      c = next;
    }
    clear_dirty();
  }

  /// Asks the agent, charges its ledger, folds the answer into the network,
  /// and refreshes the candidate caches. Queries whose answer is already
  /// known are rejected: the elicitor must never ask an inferable query.
  void ask_query(const Query& q, std::vector<SimulatedAgent>& agents) {
    switch (q.kind) {
      case Query::Kind::value: {
        BoundsNetwork& net = networks_[q.agent];
        if (net.is_known(q.bundle))
          throw std::logic_error("inferable value query on " + bundle_to_string(q.bundle));
        Money v;
        auto* cache = opts_.cache;
        if (cache && cache->values[q.agent].count(q.bundle)) {
          v = cache->values[q.agent][q.bundle];
          ++cache->hits;
        } else {
          v = agents[q.agent].answer_value(q.bundle);
          if (cache) cache->values[q.agent][q.bundle] = v;
        }
        trace_line("value", q, format_money(v));
        apply(q.agent, net.set_value(q.bundle, v));
        break;
      }
      case Query::Kind::order: {
        if (order_recorded(q.agent, q.bundle, q.other))
          throw std::logic_error("repeated order query");
        OrderAnswer ans;
        auto* cache = opts_.cache;
        const std::uint64_t key = order_key(q.bundle, q.other);
        if (cache && cache->orders[q.agent].count(key)) {
          ans = cache->orders[q.agent][key];
          ++cache->hits;
        } else {
          ans = agents[q.agent].answer_order(q.bundle, q.other);
          if (cache) cache->orders[q.agent][key] = ans;
        }
        order_seen_[q.agent].insert(key);
        trace_line("order", q,
                   ans == OrderAnswer::first ? "first" : ans == OrderAnswer::second ? "second" : "both");
        BoundsNetwork& net = networks_[q.agent];
        if (ans != OrderAnswer::second) apply(q.agent, net.add_edge(q.bundle, q.other));
        if (ans != OrderAnswer::first) apply(q.agent, net.add_edge(q.other, q.bundle));
        full_scan_ = true;  // new edges can create dominance anywhere
        break;
      }
      case Query::Kind::bound: {
        const Money z = agents[q.agent].answer_bound(q.bundle, q.side, q.hint);
        auto& rec = q.side == BoundSide::lower ? hint_lower_ : hint_upper_;
        double& d = rec[hint_slot(q.agent, q.bundle)];
        d = std::min(1.0, d + q.hint);
        trace_line("bound", q, format_money(z));
        BoundsNetwork& net = networks_[q.agent];
        apply(q.agent, q.side == BoundSide::lower ? net.tighten_lower(q.bundle, z)
                                                  : net.tighten_upper(q.bundle, z));
        break;
      }
    }
    ++queries_asked_;
  }

  /// Hypothetically tightens one bound and reports the summed width reduction
  /// over bundle-agent pairs still occurring in C, then restores the network
  /// bit for bit. z must lie inside the currently proven interval.
  Money probe_width_reduction(int i, Mask b, BoundSide side, Money z) {
    BoundsNetwork& net = networks_[i];
    const ChangeReport rep =
        side == BoundSide::lower ? net.tighten_lower(b, z) : net.tighten_upper(b, z);
    Money benefit = 0.0;
    for (const TouchedBound& t : rep.touched) {
      if (candidates_.alloc_count(i, t.bundle) == 0) continue;
      if (t.before.ub == kInf) continue;
      benefit += t.before.width() - net.bounds(t.bundle).width();
    }
    net.undo(rep);
    return benefit;
  }

  /// All (bundle, agent) pairs assigned in at least one remaining candidate.
  std::vector<std::pair<Mask, int>> allocatable_pairs() const {
    std::vector<std::pair<Mask, int>> out;
    for (Mask b = 0; b < bundle_count(items()); ++b)
      for (int i = 0; i < agents(); ++i)
        if (candidates_.alloc_count(i, b) > 0) out.emplace_back(b, i);
    return out;
  }

  /// For a non-allocatable pair: x = allocatable super-bundles whose lower
  /// bound the answer could raise, y = allocatable sub-bundles whose upper
  /// bound it could lower.
  std::pair<int, int> classify_case(Mask b, int agent) const {
    if (candidates_.alloc_count(agent, b) > 0)
      throw std::logic_error("classify_case requires a non-allocatable pair");
    const BoundsNetwork& net = networks_[agent];
    const Mask rest = grand_bundle(items()) & ~b;
    int x = 0, y = 0;
    for (Mask t = rest; t != 0; t = (t - 1) & rest) {
      const Mask super = b | t;
      if (candidates_.alloc_count(agent, super) > 0 && net.lb(super) < net.ub(b)) ++x;
    }
    for (Mask s = b & (b - 1);; s = (s - 1) & b) {
      if (candidates_.alloc_count(agent, s) > 0 && net.ub(s) > net.lb(b)) ++y;
      if (s == 0) break;
    }
    return {x, y};
  }

  /// Forces the next prune to re-examine every pair (test hook; the result
  /// must match the incremental bookkeeping exactly).
  void force_full_rescan() { full_scan_ = true; }

  /// First remaining candidate, realized as an allocation.
  Allocation chosen_allocation() const {
    Allocation a;
    const std::uint32_t c = candidates_.first_alive();
    if (c == candidates_.end()) throw std::logic_error("candidate set is empty");
    a.bundles = candidates_.candidate(c);
    return a;
  }

 private:
  static std::uint64_t order_key(Mask a, Mask b) {
    const Mask lo = a < b ? a : b, hi = a < b ? b : a;
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
  }

  std::size_t hint_slot(int i, Mask b) const {
    return static_cast<std::size_t>(i) * bundle_count(items()) + b;
  }

  void trace_line(const char* kind, const Query& q, const std::string& answer) {
    if (!opts_.trace) return;
    std::ostream& os = *opts_.trace;
    os << kind << " agent=" << q.agent;
    if (q.kind == Query::Kind::order)
      os << " a=" << bundle_to_string(q.bundle) << " b=" << bundle_to_string(q.other);
    else
      os << " bundle=" << bundle_to_string(q.bundle);
    if (q.kind == Query::Kind::bound)
      os << " side=" << (q.side == BoundSide::lower ? "lower" : "upper") << " t=" << q.hint;
    os << " -> " << answer << "\n";
  }

  // Folds a propagation report into the cached candidate sums and marks the
  // candidates whose domination status may have changed.
  void apply(int agent, const ChangeReport& rep) {
    for (const TouchedBound& t : rep.touched) {
      const Interval& now = networks_[agent].bounds(t.bundle);
      const Money dlb = now.lb - t.before.lb;
      const bool ub_dropped = now.ub < t.before.ub;
      const bool newly_known = !t.before.known() && now.known();
      for (std::uint32_t idx : candidates_.holders(agent, t.bundle)) {
        if (!candidates_.alive(idx)) continue;
        if (dlb > 0) {
          lbsum_[idx] += dlb;
          if (!dominator_dirty_[idx]) {
            dominator_dirty_[idx] = 1;
            dominator_dirty_list_.push_back(idx);
          }
        }
        if (ub_dropped) {
          if (t.before.ub == kInf) {
            --inf_count_[idx];
            ubsum_fin_[idx] += now.ub;
          } else {
            ubsum_fin_[idx] += now.ub - t.before.ub;
          }
          dominatee_dirty_[idx] = 1;
        }
        if (newly_known) --unknown_count_[idx];
      }
    }
  }

  void clear_dirty() {
    if (full_scan_) {
      std::fill(dominatee_dirty_.begin(), dominatee_dirty_.end(), 0);
      full_scan_ = false;
    } else {
      for (std::uint32_t c = candidates_.first_alive(); c != candidates_.end();
           c = candidates_.next_alive(c))
        dominatee_dirty_[c] = 0;
    }
    for (std::uint32_t idx : dominator_dirty_list_) dominator_dirty_[idx] = 0;
    dominator_dirty_list_.clear();
  }

  StateOptions opts_;
  CandidateSet candidates_;
  std::vector<BoundsNetwork> networks_;
  Rng rng_;
  std::uint64_t queries_asked_ = 0;

  std::vector<std::unordered_set<std::uint64_t>> order_seen_;

  std::vector<double> hint_lower_;
  std::vector<double> hint_upper_;

  std::vector<Money> lbsum_;
  std::vector<Money> ubsum_fin_;
  std::vector<std::uint16_t> inf_count_;
  std::vector<std::uint16_t> unknown_count_;
  std::vector<std::uint8_t> dominatee_dirty_;
  std::vector<std::uint8_t> dominator_dirty_;
  std::vector<std::uint32_t> dominator_dirty_list_;
  bool full_scan_ = true;  // first prune examines everything
};

struct SolveHooks {
  std::function<void(const ElicitationState&, const Query&)> on_query;
  std::function<void(const ElicitationState&)> after_prune;
};

struct SolveResult {
  Allocation allocation;
  std::int64_t welfare = 0;
  QueryLedger ledger;
};

/// The outer loop: select, ask, prune, until the remaining candidates are
/// provably optimal. Returns the first surviving candidate with its true
/// welfare and the cost charged during this run.
template <class Policy>
SolveResult solve(ElicitationState& st, Policy&& policy, std::vector<SimulatedAgent>& agents,
                  const SolveHooks& hooks = {}) {
  std::vector<QueryLedger> before;
  before.reserve(agents.size());
  for (const SimulatedAgent& a : agents) before.push_back(a.ledger());

  while (!st.done()) {
    const Query q = policy(st);
    if (hooks.on_query) hooks.on_query(st, q);
    st.ask_query(q, agents);
    st.prune();
    if (hooks.after_prune) hooks.after_prune(st);
  }

  SolveResult out;
  out.allocation = st.chosen_allocation();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    out.welfare += agents[i].truth()(out.allocation.bundles[i]);
    QueryLedger d = agents[i].ledger();
    d.value_queries -= before[i].value_queries;
    d.rank_queries -= before[i].rank_queries;
    d.order_queries -= before[i].order_queries;
    d.bound_queries -= before[i].bound_queries;
    d.bound_time -= before[i].bound_time;
    d.total_cost -= before[i].total_cost;
    out.ledger += d;
  }
  return out;
}

}  // namespace elicit
