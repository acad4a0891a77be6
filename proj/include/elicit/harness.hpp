#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "elicit/instance_io.hpp"
#include "elicit/oracle.hpp"
#include "elicit/policies.hpp"
#include "elicit/rank_lattice.hpp"

namespace elicit {

enum class PolicyKind {
  rank_lattice,
  random_value,
  alloc_random,
  counting_smaller,
  counting_larger,
  counting_random,
  value_order,
  bound_eb,
  bound_order,
};

inline constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::rank_lattice,     PolicyKind::random_value,   PolicyKind::alloc_random,
    PolicyKind::counting_smaller, PolicyKind::counting_larger, PolicyKind::counting_random,
    PolicyKind::value_order,      PolicyKind::bound_eb,        PolicyKind::bound_order,
};

inline const char* policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::rank_lattice: return "rank";
    case PolicyKind::random_value: return "random";
    case PolicyKind::alloc_random: return "alloc-random";
    case PolicyKind::counting_smaller: return "counting-smaller";
    case PolicyKind::counting_larger: return "counting-larger";
    case PolicyKind::counting_random: return "counting-random";
    case PolicyKind::value_order: return "value-order";
    case PolicyKind::bound_eb: return "bound-eb";
    case PolicyKind::bound_order: return "bound-order";
  }
  return "?";
}

inline std::optional<PolicyKind> policy_from_name(const std::string& s) {
  for (PolicyKind p : kAllPolicies)
    if (s == policy_name(p)) return p;
  return std::nullopt;
}

inline bool is_bound_policy(PolicyKind p) {
  return p == PolicyKind::bound_eb || p == PolicyKind::bound_order;
}

/// One CSV row. The full-revelation baseline is n(2^k - 1) value queries, or
/// 2n(2^k - 1) for bound policies where tightening both sides of one bundle
/// costs 2. The elicitation ratio divides the run's cost (rank queries for the
/// rank-lattice policy) by that baseline.
struct RunRecord {
  PolicyKind policy{};
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t value_q = 0;
  std::uint64_t rank_q = 0;
  std::uint64_t order_q = 0;
  Money bound_cost = 0.0;
  Money total_cost = 0.0;
  double baseline = 0.0;
  double ratio = 0.0;
  std::int64_t oracle_welfare = 0;
  std::int64_t achieved_welfare = 0;
  std::uint64_t instance_hash = 0;
  double wall_ms = 0.0;  // reported to the log stream, never to the CSV
};

struct RunHooks {
  SolveHooks solve;
  std::function<void(const ElicitationState&, const SolveResult&)> after_solve;
};

/// Runs one policy on one instance and checks the result against the
/// brute-force oracle. A welfare mismatch is a correctness failure and throws.
inline RunRecord run_policy_on_instance(PolicyKind kind, const std::vector<TrueValuation>& truths,
                                        std::uint64_t instance_seed, const PolicyConfig& pcfg = {},
                                        bool strict_domination = false,
                                        std::uint64_t candidate_cap = kDefaultCandidateCap,
                                        const RunHooks& hooks = {}) {
  const int n = static_cast<int>(truths.size());
  const int k = truths.empty() ? 0 : truths[0].k;
  const OptimalResult oracle = brute_force_optimal(truths, candidate_cap);

  RunRecord rec;
  rec.policy = kind;
  rec.n = n;
  rec.k = k;
  rec.seed = instance_seed;
  rec.oracle_welfare = oracle.welfare;
  rec.instance_hash = instance_hash(truths);

  CostModel cost;
  cost.order_cost = pcfg.order_cost;
  cost.asymmetric_bounds = pcfg.asymmetric_bounds;
  std::vector<SimulatedAgent> agents = make_agents(truths, cost);

  const auto start = std::chrono::steady_clock::now();
  if (kind == PolicyKind::rank_lattice) {
    const FindOptimalResult res = find_optimal(agents);
    rec.achieved_welfare = res.welfare;
    rec.value_q = res.value_queries;
    rec.rank_q = res.rank_queries;
    rec.total_cost = static_cast<Money>(res.value_queries);  // rank queries are not priced
  } else {
    StateOptions opts;
    opts.strict_domination = strict_domination;
    opts.candidate_cap = candidate_cap;
    ElicitationState st(n, k, mix_seed(instance_seed, 1000 + static_cast<std::uint64_t>(kind)),
                        opts);
    auto policy = [kind, &pcfg](ElicitationState& s) -> Query {
      switch (kind) {
        case PolicyKind::random_value: return random_value_policy(s);
        case PolicyKind::alloc_random: return allocatable_random_policy(s);
        case PolicyKind::counting_smaller: return counting_policy(s, TieBreak::smaller);
        case PolicyKind::counting_larger: return counting_policy(s, TieBreak::larger);
        case PolicyKind::counting_random: return counting_policy(s, TieBreak::random);
        case PolicyKind::value_order: return mixed_value_order_policy(s);
        case PolicyKind::bound_eb: return expected_benefit_bound_policy(s, pcfg);
        case PolicyKind::bound_order: return mixed_bound_order_policy(s, pcfg);
        default: throw std::logic_error("policy without a SelectQuery");
      }
    };
    const SolveResult res = solve(st, policy, agents, hooks.solve);
    if (hooks.after_solve) hooks.after_solve(st, res);
    rec.achieved_welfare = res.welfare;
    rec.value_q = res.ledger.value_queries;
    rec.order_q = res.ledger.order_queries;
    rec.bound_cost = res.ledger.bound_time;
    rec.total_cost = res.ledger.total_cost;
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();

  const double full = static_cast<double>(n) * (bundle_count(k) - 1.0);
  rec.baseline = is_bound_policy(kind) ? 2.0 * full : full;
  const double spent =
      kind == PolicyKind::rank_lattice ? static_cast<double>(rec.rank_q) : rec.total_cost;
  rec.ratio = rec.baseline > 0 ? spent / rec.baseline : 0.0;

  if (rec.achieved_welfare != rec.oracle_welfare)
    throw std::runtime_error(std::string("welfare mismatch: policy ") + policy_name(kind) +
                             " found " + std::to_string(rec.achieved_welfare) + " but optimum is " +
                             std::to_string(rec.oracle_welfare));
  return rec;
}

enum class SweepKind { items, agents };

/// Experiment grid. Items sweep: fixed n, k = kmin..kmax. Agents sweep: fixed
/// k, n = nmin..nmax. Every policy at a grid point sees the same instances.
struct ExperimentConfig {
  SweepKind sweep = SweepKind::items;
  std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  int runs = 10;
  std::uint64_t base_seed = 1;
  PolicyConfig policy;
  int kmin = 2, kmax = 10;
  int nmin = 2, nmax = 8;
  int fixed_n = 2, fixed_k = 4;
  bool strict_domination = false;
  std::uint64_t candidate_cap = kDefaultCandidateCap;
  std::string save_dir;
  std::string load_dir;
};

inline std::uint64_t instance_seed_for(std::uint64_t base, int n, int k, int run) {
  return mix_seed(mix_seed(mix_seed(base, 0x100 + static_cast<std::uint64_t>(n)),
                           0x200 + static_cast<std::uint64_t>(k)),
                  static_cast<std::uint64_t>(run));
}

inline constexpr const char* kSweepCsvHeader =
    "policy,n,k,seed,value_q,rank_q,order_q,bound_cost,total_cost,baseline,ratio,"
    "oracle_welfare,achieved_welfare,instance_hash";

inline void write_csv_row(std::ostream& os, const RunRecord& r) {
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.6f", r.ratio);
  os << policy_name(r.policy) << ',' << r.n << ',' << r.k << ',' << r.seed << ',' << r.value_q
     << ',' << r.rank_q << ',' << r.order_q << ',' << format_money(r.bound_cost) << ','
     << format_money(r.total_cost) << ',' << format_money(r.baseline) << ',' << ratio << ','
     << r.oracle_welfare << ',' << r.achieved_welfare << ',' << r.instance_hash << '\n';
}

/// Runs the grid and emits one CSV row per (point, run, policy). Rows are
/// written in deterministic order; timing goes to the log stream only, so the
/// CSV is byte-identical across repeated executions with the same seed.
inline std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg, std::ostream* csv,
                                        std::ostream* log = nullptr) {
  std::vector<std::pair<int, int>> points;  // (n, k)
  if (cfg.sweep == SweepKind::items)
    for (int k = cfg.kmin; k <= cfg.kmax; ++k) points.emplace_back(cfg.fixed_n, k);
  else
    for (int n = cfg.nmin; n <= cfg.nmax; ++n) points.emplace_back(n, cfg.fixed_k);

  std::vector<RunRecord> rows;
  if (csv) *csv << kSweepCsvHeader << '\n';
  for (const auto& [n, k] : points) {
    for (int run = 0; run < cfg.runs; ++run) {
      const std::uint64_t seed = instance_seed_for(cfg.base_seed, n, k, run);
      std::vector<TrueValuation> truths;
      if (!cfg.load_dir.empty()) {
        truths = load_instance_file(cfg.load_dir + "/inst_n" + std::to_string(n) + "_k" +
                                    std::to_string(k) + "_r" + std::to_string(run) + ".txt");
      } else {
        Rng rng(seed);
        truths.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) truths.push_back(generate_bids(k, rng));
      }
      if (!cfg.save_dir.empty())
        save_instance_file(cfg.save_dir + "/inst_n" + std::to_string(n) + "_k" +
                               std::to_string(k) + "_r" + std::to_string(run) + ".txt",
                           truths);
      for (PolicyKind p : cfg.policies) {
        RunRecord rec = run_policy_on_instance(p, truths, seed, cfg.policy,
                                               cfg.strict_domination, cfg.candidate_cap);
        if (csv) write_csv_row(*csv, rec);
        if (log)
          *log << policy_name(p) << " n=" << n << " k=" << k << " run=" << run << " cost="
               << format_money(rec.total_cost) << " wall_ms=" << rec.wall_ms << "\n";
        rows.push_back(rec);
      }
    }
  }
  return rows;
}

}  // namespace elicit
