#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "test_helpers.hpp"

using namespace elicit;
using namespace elicit::testing;

TEST_CASE("rank vector children increment one coordinate") {
  RankVectorCodec codec(2, 2);
  const auto root_children = codec.children(codec.root());
  REQUIRE(root_children.size() == 2);
  CHECK(codec.unpack(root_children[0]) == std::vector<std::uint32_t>{2, 1});
  CHECK(codec.unpack(root_children[1]) == std::vector<std::uint32_t>{1, 2});

  const std::uint64_t bottom = codec.pack({4, 4});
  CHECK(codec.children(bottom).empty());
}

TEST_CASE("the whole lattice is reachable from the root") {
  RankVectorCodec codec(2, 2);
  std::set<std::uint64_t> seen{codec.root()};
  std::vector<std::uint64_t> stack{codec.root()};
  while (!stack.empty()) {
    const std::uint64_t code = stack.back();
    stack.pop_back();
    for (std::uint64_t child : codec.children(code))
      if (seen.insert(child).second) stack.push_back(child);
  }
  CHECK(seen.size() == 16);  // (2^k)^n
}

TEST_CASE("rank vector bounds on the worked example") {
  RankKnowledge know(2, 2);
  // full knowledge
  auto truths = example_valuations();
  std::vector<SimulatedAgent> agents = make_agents(truths);
  for (int i = 0; i < 2; ++i)
    for (std::uint32_t r = 1; r <= 4; ++r) {
      const Mask b = agents[i].answer_rank(r);
      know.record_rank(i, r, b);
      if (!know.network(i).is_known(b)) know.record_value(i, b, agents[i].answer_value(b));
    }
  const Interval v22 = know.vector_bounds({2, 2});
  CHECK(v22.lb == 10.0);
  CHECK(v22.ub == 10.0);
  const Interval v12 = know.vector_bounds({1, 2});
  CHECK(v12.lb == 14.0);
  CHECK(v12.ub == 14.0);
  const Interval v21 = know.vector_bounds({2, 1});
  CHECK(v21.lb == 13.0);  // beaten by <1,2>, so a best-node filter drops it
}

TEST_CASE("an upper bound at a better rank caps every worse rank") {
  RankKnowledge know(2, 2);
  know.record_rank(0, 1, kAB);
  know.record_value(0, kAB, 8);
  CHECK(know.term_bounds(0, 2).ub == 8.0);
  CHECK(know.term_bounds(0, 4).ub == 8.0);
  CHECK(know.term_bounds(0, 1).lb == 8.0);
}

TEST_CASE("feasibility on the worked example") {
  auto truths = example_valuations();
  auto agents = make_agents(truths);
  RankLatticeSearch search(agents);
  RankVectorCodec codec(2, 2);
  CHECK_FALSE(search.is_feasible(codec.pack({1, 2})));  // AB and B overlap
  CHECK(search.is_feasible(codec.pack({2, 2})));        // A and B
  CHECK(search.is_feasible(codec.pack({4, 1})));        // {} and AB
}

TEST_CASE("find_optimal solves the worked example") {
  auto truths = example_valuations();
  auto agents = make_agents(truths);
  const FindOptimalResult res = find_optimal(agents);
  CHECK(res.welfare == 10);
  CHECK(res.allocation.bundles == std::vector<Mask>{kA, kB});
  CHECK(res.value_queries <= res.rank_queries);
}

TEST_CASE("find_optimal with a single agent") {
  Rng rng(2);
  std::vector<TrueValuation> truths{generate_bids(3, rng)};
  auto agents = make_agents(truths);
  const FindOptimalResult res = find_optimal(agents);
  CHECK(res.allocation.bundles == std::vector<Mask>{7});
  CHECK(res.welfare == truths[0](7));
  CHECK(res.rank_queries == 1);
  CHECK(res.value_queries <= 1);
}

TEST_CASE("find_optimal equals the oracle on seeded instances") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    const int n = 2 + static_cast<int>(seed % 2);
    const int k = 2 + static_cast<int>(seed % 3);
    std::vector<TrueValuation> truths;
    for (int i = 0; i < n; ++i) truths.push_back(generate_bids(k, rng));
    auto agents = make_agents(truths);
    const FindOptimalResult res = find_optimal(agents);
    CHECK(res.welfare == brute_force_optimal(truths).welfare);
    CHECK(res.value_queries <= res.rank_queries);
  }
}

TEST_CASE("feasible vector counts") {
  // pairwise-disjoint vectors number (n+1)^k: every item goes to an agent or
  // to nobody. Complete feasible vectors (all items placed) number n^k.
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k <= 3; ++k) {
      std::vector<TrueValuation> truths;
      Rng rng(static_cast<std::uint64_t>(n * 10 + k));
      for (int i = 0; i < n; ++i) truths.push_back(generate_bids(k, rng));
      auto agents = make_agents(truths);
      RankLatticeSearch search(agents);
      RankVectorCodec codec(n, k);

      std::uint64_t feasible = 0, complete = 0;
      std::vector<std::uint32_t> ranks(static_cast<std::size_t>(n), 1);
      const std::uint32_t top = codec.max_rank();
      while (true) {
        if (search.is_feasible(codec.pack(ranks))) {
          ++feasible;
          Mask used = 0;
          for (int i = 0; i < n; ++i)
            used |= search.knowledge().bundle_at(static_cast<int>(i), ranks[i]);
          if (used == grand_bundle(k)) ++complete;
        }
        int pos = 0;
        while (pos < n && ranks[pos] == top) ranks[pos++] = 1;
        if (pos == n) break;
        ++ranks[pos];
      }
      std::uint64_t np1k = 1, nk = 1;
      for (int i = 0; i < k; ++i) {
        np1k *= static_cast<std::uint64_t>(n) + 1;
        nk *= static_cast<std::uint64_t>(n);
      }
      CHECK(feasible == np1k);
      CHECK(complete == nk);
    }
}

TEST_CASE("expansions never pop a provably beaten node") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Rng rng(seed + 40);
    std::vector<TrueValuation> truths{generate_bids(3, rng), generate_bids(3, rng)};
    auto agents = make_agents(truths);
    RankLatticeSearch search(agents);
    RankVectorCodec codec(2, 3);
    // replay of the search loop, checking the invariant at each pop
    while (true) {
      const std::size_t at = search.find_best_node();
      const std::uint64_t code = search.code_at(at);
      const Interval popped = search.knowledge().vector_bounds(codec.unpack(code));
      for (std::uint64_t other : search.fringe_codes()) {
        if (other == code) continue;
        const Interval o = search.knowledge().vector_bounds(codec.unpack(other));
        REQUIRE(o.lb <= popped.ub);  // nobody provably beats the popped node
      }
      if (search.pop_and_expand(at)) break;  // feasible reached
    }
  }
}
