#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "elicit/elicitation.hpp"

namespace elicit {

struct ElicitedClarkeOutcome {
  std::vector<std::int64_t> payments;
  QueryLedger ledger;  // marginal cost over all n+1 runs; cache hits are free
  std::uint64_t cache_hits = 0;
};

/// Clarke payments computed by elicitation alone: one solve for the full
/// economy and one per agent removed, all sharing an answer cache so a query
/// repeated across runs is only paid once. After each solve the values of the
/// chosen bundles are elicited (cache-aware) so the payment arithmetic uses
/// known quantities.
template <class PolicyFn>
ElicitedClarkeOutcome elicited_clarke(const std::vector<TrueValuation>& truths, PolicyFn&& policy,
                                      std::uint64_t seed, CostModel cost = {},
                                      std::uint64_t candidate_cap = kDefaultCandidateCap) {
  const int n = static_cast<int>(truths.size());
  const int k = truths.empty() ? 0 : truths[0].k;
  AnswerCache cache;

  ElicitedClarkeOutcome out;
  std::vector<std::int64_t> welfare_without(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> grand_terms(static_cast<std::size_t>(n), 0);
  std::int64_t grand_welfare = 0;

  auto run_one = [&](int excluded, std::vector<std::int64_t>& terms) -> std::int64_t {
    StateOptions opts;
    opts.cache = &cache;
    opts.excluded_agent = excluded;
    opts.candidate_cap = candidate_cap;
    ElicitationState st(n, k, mix_seed(seed, static_cast<std::uint64_t>(excluded + 1)), opts);
    std::vector<SimulatedAgent> agents = make_agents(truths, cost);
    solve(st, policy, agents);
    const Allocation alloc = st.chosen_allocation();
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
      const Mask b = alloc.bundles[i];
      if (!st.network(i).is_known(b)) st.ask_query(Query::value_query(i, b), agents);
      const std::int64_t v = std::llround(st.network(i).lb(b));
      terms[i] = v;
      total += v;
    }
    for (const SimulatedAgent& a : agents) out.ledger += a.ledger();
    return total;
  };

  grand_welfare = run_one(-1, grand_terms);
  for (int i = 0; i < n; ++i) {
    if (n == 1) break;  // the economy without the only agent is empty
    std::vector<std::int64_t> terms(static_cast<std::size_t>(n), 0);
    welfare_without[i] = run_one(i, terms);
  }

  out.payments.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.payments[i] = welfare_without[i] - (grand_welfare - grand_terms[i]);
  out.cache_hits = cache.hits;
  return out;
}

}  // namespace elicit
