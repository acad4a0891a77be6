#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "elicit/agent.hpp"
#include "elicit/bounds_network.hpp"
#include "elicit/oracle.hpp"

namespace elicit {

/// Rank vectors assign each agent its r_i-th favorite bundle. The root
/// <1,1,...,1> gives everyone their top bundle; children increment exactly one
/// coordinate. Packed as k bits per agent (rank minus one), so n*k <= 64.
class RankVectorCodec {
 public:
  RankVectorCodec(int n, int k) : n_(n), bits_(k > 0 ? k : 1), max_rank_(bundle_count(k)) {
    if (n_ * bits_ > 64) throw CapacityError("rank vector does not fit in 64 bits");
  }

  int agents() const { return n_; }
  std::uint32_t max_rank() const { return max_rank_; }

  std::uint64_t root() const { return 0; }

  std::uint32_t rank(std::uint64_t code, int agent) const {
    return static_cast<std::uint32_t>((code >> (agent * bits_)) & ((std::uint64_t{1} << bits_) - 1)) + 1;
  }

  std::uint64_t pack(const std::vector<std::uint32_t>& ranks) const {
    std::uint64_t code = 0;
    for (int i = 0; i < n_; ++i) code |= static_cast<std::uint64_t>(ranks[i] - 1) << (i * bits_);
    return code;
  }

  std::vector<std::uint32_t> unpack(std::uint64_t code) const {
    std::vector<std::uint32_t> ranks(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) ranks[i] = rank(code, i);
    return ranks;
  }

  /// All vectors reachable by incrementing one coordinate, bottom excluded.
  std::vector<std::uint64_t> children(std::uint64_t code) const {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < n_; ++i)
      if (rank(code, i) < max_rank_) out.push_back(code + (std::uint64_t{1} << (i * bits_)));
    return out;
  }

 private:
  int n_;
  int bits_;
  std::uint32_t max_rank_;
};

/// What the elicitor knows during rank-lattice search: per agent, the answers
/// to rank queries so far plus a bounds network fed by value answers. The
/// value at rank r is bracketed by neighbors: any upper bound at a better
/// known rank bounds it from above, any lower bound at a worse known rank
/// from below.
class RankKnowledge {
 public:
  RankKnowledge(int n, int k) : n_(n), k_(k), size_(bundle_count(k)) {
    for (int i = 0; i < n_; ++i) {
      networks_.emplace_back(k, /*pin_empty=*/true);
      rank_bundle_.emplace_back(size_ + 1, kUnknown);
      ub_at_.emplace_back(size_ + 1, kInf);
      lb_at_.emplace_back(size_ + 1, 0.0);
    }
    dirty_.assign(static_cast<std::size_t>(n_), true);
  }

  int agents() const { return n_; }
  int items() const { return k_; }
  std::uint32_t max_rank() const { return size_; }
  const BoundsNetwork& network(int i) const { return networks_[i]; }

  bool bundle_known(int i, std::uint32_t r) const { return rank_bundle_[i][r] != kUnknown; }
  Mask bundle_at(int i, std::uint32_t r) const { return rank_bundle_[i][r]; }

  void record_rank(int i, std::uint32_t r, Mask b) {
    if (rank_bundle_[i][r] != kUnknown) throw std::logic_error("repeated rank query");
    rank_bundle_[i][r] = b;
    dirty_[i] = true;
    ++version_;
  }

  void record_value(int i, Mask b, Money v) {
    networks_[i].set_value(b, v);
    dirty_[i] = true;
    ++version_;
  }

  /// Bumped whenever recorded knowledge changes; callers may cache bounds.
  std::uint64_t version() const { return version_; }

  /// Bounds on v_i(b_i(r)) from every known rank and the network.
  Interval term_bounds(int i, std::uint32_t r) const {
    refresh(i);
    return {lb_at_[i][r], ub_at_[i][r]};
  }

  /// Bounds on the total value of a rank vector.
  Interval vector_bounds(const std::vector<std::uint32_t>& ranks) const {
    Interval sum{0.0, 0.0};
    for (int i = 0; i < n_; ++i) {
      const Interval t = term_bounds(i, ranks[i]);
      sum.lb += t.lb;
      sum.ub += t.ub;
    }
    return sum;
  }

 private:
  static constexpr Mask kUnknown = ~Mask{0};

  void refresh(int i) const {
    if (!dirty_[i]) return;
    Money running_ub = kInf;
    for (std::uint32_t r = 1; r <= size_; ++r) {
      if (rank_bundle_[i][r] != kUnknown)
        running_ub = std::min(running_ub, networks_[i].ub(rank_bundle_[i][r]));
      ub_at_[i][r] = running_ub;
    }
    Money running_lb = 0.0;  // every value is nonnegative
    for (std::uint32_t r = size_; r >= 1; --r) {
      if (rank_bundle_[i][r] != kUnknown)
        running_lb = std::max(running_lb, networks_[i].lb(rank_bundle_[i][r]));
      lb_at_[i][r] = running_lb;
    }
    dirty_[i] = false;
  }

  int n_;
  int k_;
  std::uint32_t size_;
  std::uint64_t version_ = 0;
  std::vector<BoundsNetwork> networks_;
  std::vector<std::vector<Mask>> rank_bundle_;
  mutable std::vector<std::vector<Money>> ub_at_;
  mutable std::vector<std::vector<Money>> lb_at_;
  mutable std::vector<bool> dirty_;

  friend class RankLatticeSearch;
};

struct FindOptimalResult {
  Allocation allocation;
  std::int64_t welfare = 0;
  std::uint64_t rank_queries = 0;
  std::uint64_t value_queries = 0;
  std::uint64_t expansions = 0;
};

/// Best-first search over the rank lattice. Starting from the root and always
/// expanding a fringe node of provably maximal value, the first feasible node
/// reached realizes an optimal allocation. Determining which node is best
/// usually takes elicitation; the search asks rank and value queries only when
/// the fringe bounds cannot settle the comparison.
///
/// Fringe entries carry cached bounds, refreshed only when recorded knowledge
/// changes. The weak-domination sweep (drop every entry whose upper bound
/// another remaining entry provably matches, scanning in insertion order)
/// collapses to a closed form: with M the maximal lower bound, entries with
/// ub < M die, entries with ub > M live, and of the entries pinned at exactly
/// [*, M] only those with lb < M die, except that a tie group lying entirely
/// at [M, M] keeps its last member.
class RankLatticeSearch {
 public:
  explicit RankLatticeSearch(std::vector<SimulatedAgent>& agents)
      : agents_(agents),
        codec_(static_cast<int>(agents.size()), agents.empty() ? 0 : agents[0].items()),
        knowledge_(static_cast<int>(agents.size()), agents.empty() ? 0 : agents[0].items()) {
    if (agents_.empty()) throw std::invalid_argument("need at least one agent");
    fringe_.push_back({codec_.root(), 0.0, kInf, false});
    seen_.insert(codec_.root());
  }

  const RankKnowledge& knowledge() const { return knowledge_; }

  std::uint64_t code_at(std::size_t at) const { return fringe_[at].code; }

  /// Codes of the live fringe entries in insertion order.
  std::vector<std::uint64_t> fringe_codes() const {
    std::vector<std::uint64_t> out;
    out.reserve(fringe_.size() - dead_);
    for (const Entry& e : fringe_)
      if (!e.dead) out.push_back(e.code);
    return out;
  }

  FindOptimalResult run() {
    while (true) {
      const std::size_t at = find_best_node();
      if (pop_and_expand(at)) return result_;
    }
  }

  /// Pops one fringe entry. A feasible pop finalizes the result and returns
  /// true; an infeasible one queues its unseen children.
  bool pop_and_expand(std::size_t at) {
    const std::uint64_t code = fringe_[at].code;
    fringe_[at].dead = true;
    if (++dead_ * 2 > fringe_.size()) compact();
    ++result_.expansions;
    if (is_feasible(code)) {
      result_.allocation.bundles.resize(agents_.size());
      result_.welfare = 0;
      for (int i = 0; i < codec_.agents(); ++i) {
        const Mask b = knowledge_.bundle_at(i, codec_.rank(code, i));
        result_.allocation.bundles[i] = b;
        result_.welfare += agents_[i].truth()(b);
      }
      result_.rank_queries = total_rank_queries();
      result_.value_queries = total_value_queries();
      return true;
    }
    for (std::uint64_t child : codec_.children(code))
      if (seen_.insert(child).second) fringe_.push_back({child, 0.0, kInf, false});
    return false;
  }

  const FindOptimalResult& result() const { return result_; }

  /// Elicits any unknown bundles of the vector, then tests disjointness.
  bool is_feasible(std::uint64_t code) {
    Mask used = 0;
    for (int i = 0; i < codec_.agents(); ++i) {
      const Mask b = bundle_for(i, codec_.rank(code, i));
      if ((used & b) != 0) return false;
      used |= b;
    }
    return true;
  }

  /// One round of the best-node loop: filter dominated fringe entries, return
  /// the position of a provably best one, eliciting where bounds are too
  /// loose. Elicits nothing when the fringe already proves a winner.
  std::size_t find_best_node() {
    if (fringe_.size() == dead_) throw std::logic_error("find_best_node on an empty fringe");
    while (true) {
      sync_bounds();

      Money max_lb = -kInf;
      for (const Entry& e : fringe_) {
        if (e.dead) continue;
        if (e.lb > max_lb) max_lb = e.lb;
      }

      // tie group pinned at [max_lb, max_lb]: keeps its last member only when
      // no group member reaches above max_lb
      bool group_reaches_higher = false;
      std::size_t last_pinned = fringe_.size();
      for (std::size_t i = 0; i < fringe_.size(); ++i) {
        const Entry& e = fringe_[i];
        if (e.dead || e.lb != max_lb) continue;
        if (e.ub > max_lb)
          group_reaches_higher = true;
        else
          last_pinned = i;
      }

      std::size_t survivors = 0, first_survivor = 0, pick = fringe_.size();
      Money pick_ub = -kInf;
      bool all_known = true;
      for (std::size_t i = 0; i < fringe_.size(); ++i) {
        const Entry& e = fringe_[i];
        if (e.dead) continue;
        const bool alive =
            e.ub > max_lb || (!group_reaches_higher && i == last_pinned);
        if (!alive) continue;
        if (survivors++ == 0) first_survivor = i;
        if (e.lb != e.ub) {
          all_known = false;
          if (e.ub > pick_ub) {
            pick_ub = e.ub;
            pick = i;
          }
        }
      }
      if (survivors == 1 || all_known) return first_survivor;
      elicit_vector(fringe_[pick].code);
    }
  }

 private:
  struct Entry {
    std::uint64_t code;
    Money lb;
    Money ub;
    bool dead;
  };

  void compact() {
    std::size_t w = 0;
    for (std::size_t r = 0; r < fringe_.size(); ++r)
      if (!fringe_[r].dead) fringe_[w++] = fringe_[r];
    fringe_.resize(w);
    dead_ = 0;
    if (synced_upto_ > w) synced_upto_ = w;
  }

  void entry_bounds(Entry& e) {
    Money lb = 0.0, ub = 0.0;
    for (int i = 0; i < codec_.agents(); ++i) {
      const Interval t = knowledge_.term_bounds(i, codec_.rank(e.code, i));
      lb += t.lb;
      ub += t.ub;
    }
    e.lb = lb;
    e.ub = ub;
  }

  void sync_bounds() {
    const std::uint64_t v = knowledge_.version();
    if (v != synced_version_) {
      for (Entry& e : fringe_)
        if (!e.dead) entry_bounds(e);
      synced_version_ = v;
      synced_upto_ = fringe_.size();
      return;
    }
    for (std::size_t i = synced_upto_; i < fringe_.size(); ++i)
      if (!fringe_[i].dead) entry_bounds(fringe_[i]);
    synced_upto_ = fringe_.size();
  }

  Mask bundle_for(int i, std::uint32_t r) {
    if (!knowledge_.bundle_known(i, r)) knowledge_.record_rank(i, r, agents_[i].answer_rank(r));
    return knowledge_.bundle_at(i, r);
  }

  // Rank query for every unknown bundle of the vector, then a value query for
  // every term whose value is still not pinned down.
  void elicit_vector(std::uint64_t code) {
    for (int i = 0; i < codec_.agents(); ++i) {
      const std::uint32_t r = codec_.rank(code, i);
      const Mask b = bundle_for(i, r);
      if (!knowledge_.term_bounds(i, r).known())
        knowledge_.record_value(i, b, agents_[i].answer_value(b));
    }
  }

  std::uint64_t total_rank_queries() const {
    std::uint64_t total = 0;
    for (const SimulatedAgent& a : agents_) total += a.ledger().rank_queries;
    return total;
  }
  std::uint64_t total_value_queries() const {
    std::uint64_t total = 0;
    for (const SimulatedAgent& a : agents_) total += a.ledger().value_queries;
    return total;
  }

  std::vector<SimulatedAgent>& agents_;
  RankVectorCodec codec_;
  RankKnowledge knowledge_;
  std::vector<Entry> fringe_;
  std::size_t dead_ = 0;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t synced_version_ = ~std::uint64_t{0};
  std::size_t synced_upto_ = 0;
  FindOptimalResult result_;
};

/// Full rank-lattice elicitation on fresh knowledge.
inline FindOptimalResult find_optimal(std::vector<SimulatedAgent>& agents) {
  return RankLatticeSearch(agents).run();
}

}  // namespace elicit
