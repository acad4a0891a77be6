#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "elicit/bundle.hpp"
#include "elicit/types.hpp"

namespace elicit {

struct Interval {
  Money lb = 0.0;
  Money ub = kInf;
  bool known() const { return lb == ub; }
  Money width() const { return ub - lb; }
};

inline std::string format_money(Money v) {
  if (v == kInf) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

struct TouchedBound {
  Mask bundle;
  Interval before;
};

/// Result of one network update: the summed finite-width shrinkage plus a
/// first-touch snapshot of every bundle whose interval moved. Widths that were
/// infinite before the update are left out of the total, so callers comparing
/// benefit must first establish a finite upper bound (grand-bundle first).
/// The snapshots also serve as an undo log for hypothetical probes.
struct ChangeReport {
  Money width_reduction = 0.0;
  std::vector<TouchedBound> touched;
};

/// The elicitor's knowledge about one agent: an interval [LB(b), UB(b)] per
/// bundle and a dominance graph. An edge (a,b) means v(a) >= v(b) is proven.
/// Free-disposal edges (each bundle to its one-item-removed subsets) are
/// implicit and always present; order answers add explicit extra edges, which
/// may form cycles (equality). Propagation keeps the fixpoint
///   edge (a,b)  =>  lb(a) >= lb(b)  and  ub(a) <= ... ub(b) <= ub(a)
/// after every update. Bounds move monotonically over the network's lifetime:
/// lb never decreases, ub never increases.
class BoundsNetwork {
 public:
  explicit BoundsNetwork(int k, bool pin_empty = true)
      : k_(k),
        size_(bundle_count(k)),
        pin_empty_(pin_empty),
        bounds_(size_),
        extra_out_(size_),
        extra_in_(size_),
        touch_epoch_(size_, 0) {
    if (pin_empty_) bounds_[0] = Interval{0.0, 0.0};
  }

  int items() const { return k_; }
  Mask size() const { return size_; }
  bool empty_pinned() const { return pin_empty_; }
  const Interval& bounds(Mask b) const { return bounds_[b]; }
  Money lb(Mask b) const { return bounds_[b].lb; }
  Money ub(Mask b) const { return bounds_[b].ub; }
  bool is_known(Mask b) const { return bounds_[b].known(); }
  bool has_order_edges() const { return has_extra_; }

  /// Records an exact value answer and propagates both bounds.
  ChangeReport set_value(Mask b, Money v) {
    const Interval iv = bounds_[b];
    if (v < iv.lb || v > iv.ub)
      throw InconsistentAnswer("value " + format_money(v) + " for " + bundle_to_string(b) +
                               " outside proven [" + format_money(iv.lb) + ", " +
                               format_money(iv.ub) + "]");
    Work w = begin();
    apply_lb(b, v, w);
    apply_ub(b, v, w);
    run(w);
    return finish(w);
  }

  ChangeReport tighten_lower(Mask b, Money z) {
    Work w = begin();
    apply_lb(b, z, w);
    run(w);
    return finish(w);
  }

  ChangeReport tighten_upper(Mask b, Money z) {
    Work w = begin();
    apply_ub(b, z, w);
    run(w);
    return finish(w);
  }

  /// Adds the dominance edge (a,b), i.e. v(a) >= v(b). Self-edges are no-ops;
  /// inserting both orientations encodes equality and is propagated through
  /// the same worklist (bounds around a cycle converge to a common interval).
  ChangeReport add_edge(Mask a, Mask b) {
    if (a == b || is_subset(b, a)) return {};  // already implied
    if (std::find(extra_out_[a].begin(), extra_out_[a].end(), b) == extra_out_[a].end()) {
      extra_out_[a].push_back(b);
      extra_in_[b].push_back(a);
      has_extra_ = true;
      if (size_ <= kReachCacheLimit) {
        ensure_reach();
        close_reach(a, b);
      }
    }
    Work w = begin();
    if (bounds_[b].lb > bounds_[a].lb) apply_lb(a, bounds_[b].lb, w);
    if (bounds_[a].ub < bounds_[b].ub) apply_ub(b, bounds_[a].ub, w);
    run(w);
    return finish(w);
  }

  /// Proven v(a) >= v(b): either the bounds separate, or a directed path
  /// (implicit free-disposal edges plus recorded order edges) runs a -> b.
  bool dominates(Mask a, Mask b) const {
    if (bounds_[a].lb >= bounds_[b].ub) return true;
    if (is_subset(b, a)) return true;
    if (!has_extra_) return false;
    if (!reach_.empty()) return reach_bit(a, b);
    return path_search(a, b);
  }

  /// Restores the intervals snapshotted in a report, newest first. Only valid
  /// for reports from set_value / tighten_* (edge insertions are not undone).
  void undo(const ChangeReport& r) {
    for (auto it = r.touched.rbegin(); it != r.touched.rend(); ++it)
      bounds_[it->bundle] = it->before;
  }

  /// Text listing "bundle: [lb, ub]" in enumeration order.
  std::string dump() const {
    std::string out;
    for (Mask b = 0; b < size_; ++b) {
      out += bundle_to_string(b);
      out += ": [" + format_money(bounds_[b].lb) + ", " + format_money(bounds_[b].ub) + "]\n";
    }
    return out;
  }

 private:
  static constexpr Mask kReachCacheLimit = Mask{1} << 12;

  struct Work {
    ChangeReport report;
    std::vector<Mask> lb_queue;
    std::vector<Mask> ub_queue;
  };

  Work begin() {
    ++epoch_;
    return Work{};
  }

  void touch(Mask b, Work& w) {
    if (touch_epoch_[b] != epoch_) {
      touch_epoch_[b] = epoch_;
      w.report.touched.push_back({b, bounds_[b]});
    }
  }

  void apply_lb(Mask b, Money z, Work& w) {
    Interval& iv = bounds_[b];
    if (z <= iv.lb) return;
    if (z > iv.ub)
      throw InconsistentAnswer("lower bound " + format_money(z) + " on " + bundle_to_string(b) +
                               " exceeds proven upper bound " + format_money(iv.ub));
    touch(b, w);
    iv.lb = z;
    w.lb_queue.push_back(b);
  }

  void apply_ub(Mask b, Money z, Work& w) {
    Interval& iv = bounds_[b];
    if (z >= iv.ub) return;
    if (z < iv.lb)
      throw InconsistentAnswer("upper bound " + format_money(z) + " on " + bundle_to_string(b) +
                               " below proven lower bound " + format_money(iv.lb));
    touch(b, w);
    iv.ub = z;
    w.ub_queue.push_back(b);
  }

  // Worklist to fixpoint. Queued entries may be stale; each step re-reads the
  // current bound, which is monotone, so the loop terminates.
  void run(Work& w) {
    const Mask grand = size_ - 1;
    while (!w.lb_queue.empty() || !w.ub_queue.empty()) {
      if (!w.lb_queue.empty()) {
        const Mask b = w.lb_queue.back();
        w.lb_queue.pop_back();
        const Money z = bounds_[b].lb;
        for (Mask rest = grand & ~b; rest != 0; rest &= rest - 1) {
          const Mask parent = b | (rest & (0u - rest));
          if (bounds_[parent].lb < z) apply_lb(parent, z, w);
        }
        for (Mask parent : extra_in_[b])
          if (bounds_[parent].lb < z) apply_lb(parent, z, w);
      } else {
        const Mask b = w.ub_queue.back();
        w.ub_queue.pop_back();
        const Money z = bounds_[b].ub;
        for (Mask items = b; items != 0; items &= items - 1) {
          const Mask child = b ^ (items & (0u - items));
          if (bounds_[child].ub > z) apply_ub(child, z, w);
        }
        for (Mask child : extra_out_[b])
          if (bounds_[child].ub > z) apply_ub(child, z, w);
      }
    }
  }

  ChangeReport finish(Work& w) {
    for (const TouchedBound& t : w.report.touched) {
      if (t.before.ub == kInf) continue;  // infinite width excluded from reports
      w.report.width_reduction += t.before.width() - bounds_[t.bundle].width();
    }
    return std::move(w.report);
  }

  // Reachability closure over implicit subset edges plus extra edges, one bit
  // per (a,b) pair. Rebuilt incrementally: adding (a,b) marks every pair
  // (ancestor of a, descendant of b).
  void ensure_reach() const {
    if (!reach_.empty()) return;
    words_per_row_ = (size_ + 63) / 64;
    reach_.assign(static_cast<std::size_t>(size_) * words_per_row_, 0);
    for (Mask a = 0; a < size_; ++a) {
      std::uint64_t* row = &reach_[static_cast<std::size_t>(a) * words_per_row_];
      for (Mask s = a;; s = (s - 1) & a) {
        row[s >> 6] |= std::uint64_t{1} << (s & 63);
        if (s == 0) break;
      }
    }
  }

  void close_reach(Mask a, Mask b) const {
    const std::uint64_t* row_b = &reach_[static_cast<std::size_t>(b) * words_per_row_];
    for (Mask p = 0; p < size_; ++p) {
      if (!reach_bit(p, a)) continue;
      std::uint64_t* row = &reach_[static_cast<std::size_t>(p) * words_per_row_];
      for (Mask w = 0; w < words_per_row_; ++w) row[w] |= row_b[w];
    }
  }

  bool reach_bit(Mask a, Mask b) const {
    return (reach_[static_cast<std::size_t>(a) * words_per_row_ + (b >> 6)] >>
            (b & 63)) & 1;
  }

  // Depth-first fallback for networks too large for the closure cache.
  bool path_search(Mask a, Mask b) const {
    if (scratch_seen_.size() != size_) scratch_seen_.assign(size_, 0);
    ++scratch_epoch_;
    scratch_stack_.clear();
    scratch_stack_.push_back(a);
    scratch_seen_[a] = scratch_epoch_;
    while (!scratch_stack_.empty()) {
      const Mask x = scratch_stack_.back();
      scratch_stack_.pop_back();
      if (is_subset(b, x)) return true;
      for (Mask items = x; items != 0; items &= items - 1) {
        const Mask child = x ^ (items & (0u - items));
        if (scratch_seen_[child] != scratch_epoch_) {
          scratch_seen_[child] = scratch_epoch_;
          scratch_stack_.push_back(child);
        }
      }
      for (Mask child : extra_out_[x])
        if (scratch_seen_[child] != scratch_epoch_) {
          scratch_seen_[child] = scratch_epoch_;
          scratch_stack_.push_back(child);
        }
    }
    return false;
  }

  int k_;
  Mask size_;
  bool pin_empty_;
  bool has_extra_ = false;
  std::vector<Interval> bounds_;
  std::vector<std::vector<Mask>> extra_out_;
  std::vector<std::vector<Mask>> extra_in_;
  std::vector<std::uint32_t> touch_epoch_;
  std::uint32_t epoch_ = 0;
  mutable std::vector<std::uint64_t> reach_;
  mutable Mask words_per_row_ = 0;
  mutable std::vector<std::uint32_t> scratch_seen_;
  mutable std::uint32_t scratch_epoch_ = 0;
  mutable std::vector<Mask> scratch_stack_;
};

}  // namespace elicit
