#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "test_helpers.hpp"

using namespace elicit;
using namespace elicit::testing;

TEST_CASE("non-allocatable-reveal fixture reaches the intended elicitation state") {
  NonAllocatableRevealFixture fx(1);
  REQUIRE(fx.truths[0].free_disposal_ok());
  REQUIRE(fx.truths[1].free_disposal_ok());
  CHECK(fx.state.candidates().alive_count() == 3);
  CHECK(fx.state.candidates().alloc_count(0, 3) == 0);  // {0,1} not allocatable
  const auto c = fx.state.classify_case(3, 0);
  CHECK(c.first == 0);
  CHECK(c.second == 2);
  CHECK_FALSE(fx.state.done());
}

TEST_CASE("restricted random always needs two more queries on the fixture") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    NonAllocatableRevealFixture fx(seed);
    const SolveResult res = solve(
        fx.state, [](ElicitationState& s) { return allocatable_random_policy(s); }, fx.agents);
    CHECK(res.welfare == 100);
    CHECK(fx.value_queries() - fx.prefix_queries == 2);
  }
}

TEST_CASE("unrestricted random sometimes finishes the fixture in one query") {
  int one_query_runs = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    NonAllocatableRevealFixture fx(seed);
    const SolveResult res =
        solve(fx.state, [](ElicitationState& s) { return random_value_policy(s); }, fx.agents);
    CHECK(res.welfare == 100);
    const std::uint64_t spent = fx.value_queries() - fx.prefix_queries;
    REQUIRE(spent >= 1);
    if (spent == 1) ++one_query_runs;
  }
  CHECK(one_query_runs > 0);  // expected rate is 1 in 6
}

TEST_CASE("random policy draws from the full unasked pool") {
  auto truths = example_valuations();
  ElicitationState st(2, 2, 3);
  auto agents = make_agents(truths);
  const SolveResult res =
      solve(st, [](ElicitationState& s) { return random_value_policy(s); }, agents);
  CHECK(res.welfare == 10);
  CHECK(res.ledger.value_queries <= 6);  // never more than n(2^k - 1)
}

TEST_CASE("allocatable policy only issues allocatable queries") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<TrueValuation> truths{generate_bids(4, rng), generate_bids(4, rng)};
    ElicitationState st(2, 4, seed);
    auto agents = make_agents(truths);
    SolveHooks hooks;
    hooks.on_query = [](const ElicitationState& s, const Query& q) {
      REQUIRE(q.kind == Query::Kind::value);
      REQUIRE(q.bundle != 0);
      REQUIRE(s.candidates().alloc_count(q.agent, q.bundle) > 0);
      REQUIRE_FALSE(s.network(q.agent).is_known(q.bundle));
    };
    const SolveResult res = solve(
        st, [](ElicitationState& s) { return allocatable_random_policy(s); }, agents, hooks);
    CHECK(res.welfare == brute_force_optimal(truths).welfare);
  }
}

TEST_CASE("counting policy with the smaller tie-break reveals everything") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    std::vector<TrueValuation> truths{generate_bids(4, rng), generate_bids(4, rng)};
    ElicitationState st(2, 4, seed);
    auto agents = make_agents(truths);
    const SolveResult res = solve(
        st, [](ElicitationState& s) { return counting_policy(s, TieBreak::smaller); }, agents);
    CHECK(res.ledger.value_queries == 2 * 15);  // exactly n(2^k - 1)
  }
}

TEST_CASE("counting policy with the larger tie-break stops early") {
  double ratio_sum = 0;
  const int runs = 5;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    Rng rng(seed);
    std::vector<TrueValuation> truths{generate_bids(6, rng), generate_bids(6, rng)};
    ElicitationState st(2, 6, seed);
    auto agents = make_agents(truths);
    const SolveResult res = solve(
        st, [](ElicitationState& s) { return counting_policy(s, TieBreak::larger); }, agents);
    ratio_sum += static_cast<double>(res.ledger.value_queries) / (2 * 63);
  }
  CHECK(ratio_sum / runs < 0.9);
}

TEST_CASE("mixed policy starts with an order query and never repeats one") {
  Rng rng(4);
  std::vector<TrueValuation> truths{generate_bids(3, rng), generate_bids(3, rng)};
  ElicitationState st(2, 3, 4);
  auto agents = make_agents(truths);
  bool first = true;
  SolveHooks hooks;
  hooks.on_query = [&](const ElicitationState& s, const Query& q) {
    if (first) {
      REQUIRE(q.kind == Query::Kind::order);
      first = false;
    }
    if (q.kind == Query::Kind::order) {
      REQUIRE_FALSE(s.order_recorded(q.agent, q.bundle, q.other));
      const BoundsNetwork& net = s.network(q.agent);
      REQUIRE_FALSE(net.dominates(q.bundle, q.other));
      REQUIRE_FALSE(net.dominates(q.other, q.bundle));
    }
  };
  const SolveResult res =
      solve(st, [](ElicitationState& s) { return mixed_value_order_policy(s); }, agents, hooks);
  CHECK(res.welfare == brute_force_optimal(truths).welfare);
  CHECK(res.ledger.order_queries > 0);
}

TEST_CASE("expected-benefit policy opens with grand-bundle upper bounds") {
  Rng rng(9);
  std::vector<TrueValuation> truths{generate_bids(3, rng), generate_bids(3, rng)};
  ElicitationState st(2, 3, 9);
  auto agents = make_agents(truths);
  PolicyConfig cfg;
  int seen = 0;
  SolveHooks hooks;
  hooks.on_query = [&](const ElicitationState&, const Query& q) {
    if (seen < 2) {
      REQUIRE(q.kind == Query::Kind::bound);
      REQUIRE(q.bundle == grand_bundle(3));
      REQUIRE(q.side == BoundSide::upper);
      REQUIRE(q.agent == seen);
    }
    ++seen;
  };
  const SolveResult res = solve(
      st, [&cfg](ElicitationState& s) { return expected_benefit_bound_policy(s, cfg); }, agents,
      hooks);
  CHECK(res.welfare == brute_force_optimal(truths).welfare);
  CHECK(res.ledger.value_queries == 0);

  // the elicitor's hint record tracks each agent's internal clock exactly
  for (int i = 0; i < 2; ++i)
    for (Mask b = 0; b < 8; ++b)
      for (BoundSide side : {BoundSide::lower, BoundSide::upper})
        CHECK(st.hint_issued(i, b, side) == agents[i].bound_progress(b, side));
}

TEST_CASE("benefit probes leave no trace in the state") {
  Rng rng(12);
  std::vector<TrueValuation> truths{generate_bids(3, rng), generate_bids(3, rng)};
  ElicitationState st(2, 3, 12);
  auto agents = make_agents(truths);
  PolicyConfig cfg;
  // put some structure in the networks first
  st.ask_query(Query::bound_query(0, 7, BoundSide::upper, 0.2), agents);
  st.ask_query(Query::bound_query(1, 7, BoundSide::upper, 0.2), agents);
  st.prune();
  const std::string before0 = st.network(0).dump();
  const std::string before1 = st.network(1).dump();
  (void)expected_benefit_bound_policy(st, cfg);
  CHECK(st.network(0).dump() == before0);
  CHECK(st.network(1).dump() == before1);
}

TEST_CASE("bound-and-order policy alternates and stays exact") {
  Rng rng(21);
  std::vector<TrueValuation> truths{generate_bids(4, rng), generate_bids(4, rng)};
  ElicitationState st(2, 4, 21);
  auto agents = make_agents(truths);
  PolicyConfig cfg;
  const SolveResult res = solve(
      st, [&cfg](ElicitationState& s) { return mixed_bound_order_policy(s, cfg); }, agents);
  CHECK(res.welfare == brute_force_optimal(truths).welfare);
  CHECK(res.ledger.order_queries > 0);
  CHECK(res.ledger.bound_queries > 0);
  // order turns charge the order cost, bound turns the hint
  CHECK(res.ledger.total_cost ==
        Catch::Approx(0.1 * res.ledger.order_queries + res.ledger.bound_time));
}

TEST_CASE("asymmetric bound model stays exact end to end") {
  Rng rng(55);
  std::vector<TrueValuation> truths{generate_bids(4, rng), generate_bids(4, rng)};
  CostModel cm;
  cm.asymmetric_bounds = true;
  ElicitationState st(2, 4, 55);
  auto agents = make_agents(truths, cm);
  PolicyConfig cfg;
  cfg.asymmetric_bounds = true;
  const SolveResult res = solve(
      st, [&cfg](ElicitationState& s) { return expected_benefit_bound_policy(s, cfg); }, agents);
  CHECK(res.welfare == brute_force_optimal(truths).welfare);
}

TEST_CASE("fixed seeds give identical query sequences") {
  Rng rng(33);
  std::vector<TrueValuation> truths{generate_bids(4, rng), generate_bids(4, rng)};
  auto run_trace = [&](std::uint64_t seed) {
    std::ostringstream trace;
    StateOptions opts;
    opts.trace = &trace;
    ElicitationState st(2, 4, seed, opts);
    auto agents = make_agents(truths);
    solve(st, [](ElicitationState& s) { return mixed_value_order_policy(s); }, agents);
    return trace.str();
  };
  CHECK(run_trace(5) == run_trace(5));
  CHECK(run_trace(5) != run_trace(6));  // different draw order
}
