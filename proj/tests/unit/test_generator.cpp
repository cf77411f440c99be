#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "deanon/generator.hpp"

using namespace deanon;

TEST_CASE("prefix tree agrees with a linear scan") {
  Rng rng(3);
  std::vector<double> w(37);
  for (auto& x : w) x = rng.uniform() + 0.01;
  PrefixSumTree tree(w);
  for (int round = 0; round < 200; ++round) {
    const std::size_t i = rng.below(w.size());
    const double d = rng.uniform();
    w[i] += d;
    tree.add(i, d);
    const std::size_t q = rng.below(w.size() + 1);
    CHECK(tree.prefix(q) == doctest::Approx(std::accumulate(w.begin(), w.begin() + q, 0.0)));
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t expect = 0;
    while (acc + w[expect] <= target) acc += w[expect++];
    CHECK(tree.find(target) == expect);
  }
}

TEST_CASE("selection probabilities") {
  SUBCASE("uniform start") {
    PopularityState s(GenerationParams::alpha_pa(4, 10, 1, 1.0));
    for (GroupId j = 0; j < 4; ++j) CHECK(selection_probability(s, j) == doctest::Approx(0.25));
  }
  SUBCASE("linear attachment after three edges") {
    PopularityState s(GenerationParams::alpha_pa(3, 10, 1, 1.0));
    s.select(0);
    s.select(0);
    s.select(2);
    CHECK(selection_probability(s, 0) == doctest::Approx(1.0 / 2.0));
    CHECK(selection_probability(s, 1) == doctest::Approx(1.0 / 6.0));
    CHECK(selection_probability(s, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(s.total() == doctest::Approx(6.0));
  }
  SUBCASE("stochastic block stays fixed") {
    PopularityState s(GenerationParams::stochastic_block(10, 1, {1.0, 2.0}));
    for (int step = 0; step < 5; ++step) {
      CHECK(selection_probability(s, 0) == doctest::Approx(1.0 / 3.0));
      CHECK(selection_probability(s, 1) == doctest::Approx(2.0 / 3.0));
      s.select(static_cast<GroupId>(step % 2));
    }
  }
}

TEST_CASE("popularity update") {
  CHECK(popularity_update(ModelKind::AlphaPA, 5.0, 1.0, 5, 1.0) == 6.0);
  CHECK(popularity_update(ModelKind::AlphaPA, 2.7, 1.0, 4, 0.5) == doctest::Approx(3.0));
  CHECK(popularity_update(ModelKind::StochasticBlock, 2.0, 2.0, 17, 0.0) == 2.0);
  CHECK_THROWS(popularity_update(ModelKind::AlphaPA, 1.0, 1.0, 0, 1.0));
  CHECK_THROWS(popularity_update(ModelKind::AlphaPA, 1.0, 1.0, 1, 1.2));
  // the iterated form reaches the same value
  for (double alpha : {0.25, 0.5, 0.8, 1.0}) {
    double tau = 1.0;
    for (std::size_t d = 1; d <= 20; ++d) {
      tau = popularity_step(tau, 1.0, alpha);
      CHECK(tau == doctest::Approx(popularity_update(ModelKind::AlphaPA, 0.0, 1.0, d, alpha)).epsilon(1e-9));
    }
  }
}

TEST_CASE("edge count identity") {
  for (double alpha : {0.25, 1.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const auto params = GenerationParams::alpha_pa(6, 4, 3, alpha);
      const auto gt = generate_ground_truth(params, rng);
      CHECK(gt.graph.num_edges() + gt.skipped_steps.size() == params.delta());
    }
  }
  Rng rng(1);
  const auto gt = generate_ground_truth(GenerationParams::alpha_pa(100, 1000, 3, 1.0), rng);
  CHECK(gt.skipped_steps.empty());
  CHECK(gt.graph.num_edges() == 300);
}

TEST_CASE("single group, three users, two steps") {
  std::map<EdgeSetKey, int> counts;
  Rng rng(8);
  for (int i = 0; i < 30000; ++i) {
    const auto gt = generate_ground_truth(GenerationParams::alpha_pa(1, 3, 2, 0.5), rng);
    REQUIRE(gt.graph.group_size(0) == 2);
    ++counts[edge_set_key(gt.graph)];
  }
  CHECK(counts.size() == 3);
  for (const auto& [key, c] : counts) CHECK(std::abs(c / 30000.0 - 1.0 / 3.0) < 0.015);
}

TEST_CASE("stochastic block with equal popularity samples uniformly at every step") {
  Rng rng(4);
  const auto params = GenerationParams::iee(7, 20, 3);
  generate_ground_truth(params, rng, [](std::size_t, const PopularityState& s) {
    for (GroupId j = 0; j < s.size(); ++j) CHECK(selection_probability(s, j) == doctest::Approx(1.0 / 7.0));
  });
}

TEST_CASE("brute force oracle") {
  SUBCASE("one group, two users, one step") {
    const auto d = brute_force_generation_distribution(GenerationParams::alpha_pa(1, 2, 1, 1.0));
    CHECK(d.size() == 2);
    for (const auto& [k, p] : d) CHECK(p == doctest::Approx(0.5));
  }
  SUBCASE("two groups, two users, two steps: hand enumeration") {
    const auto d = brute_force_generation_distribution(GenerationParams::alpha_pa(2, 2, 1, 1.0));
    // codes j*m + k
    std::map<EdgeSetKey, double> expect{{{0, 1}, 1.0 / 3.0}, {{2, 3}, 1.0 / 3.0}};
    for (std::uint64_t a : {0, 1}) {
      for (std::uint64_t b : {2, 3}) expect[{a, b}] = 1.0 / 12.0;
    }
    REQUIRE(d.size() == expect.size());
    double total = 0.0;
    for (const auto& [k, p] : d) {
      CHECK(p == doctest::Approx(expect.at(k)).epsilon(1e-12));
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("skips appear when a group is full") {
    const auto d = brute_force_generation_distribution(GenerationParams::alpha_pa(2, 1, 1, 1.0));
    double one_edge = 0.0;
    for (const auto& [k, p] : d) one_edge += k.size() == 1 ? p : 0.0;
    // step 1 picks a group (tau becomes 2 vs 1); step 2 repeats it with probability 2/3
    CHECK(one_edge == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("budget") {
    CHECK_THROWS_AS(brute_force_generation_distribution(GenerationParams::alpha_pa(10, 10, 5, 1.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("generator matches the oracle in total variation") {
  for (double alpha : {0.5, 1.0}) {
    const auto params = GenerationParams::alpha_pa(2, 3, 1, alpha);
    const auto exact = brute_force_generation_distribution(params);
    std::map<EdgeSetKey, double> freq;
    Rng rng(12);
    const int runs = 40000;
    for (int i = 0; i < runs; ++i) freq[edge_set_key(generate_ground_truth(params, rng).graph)] += 1.0 / runs;
    double tv = 0.0;
    for (const auto& [k, p] : exact) tv += std::abs(p - (freq.contains(k) ? freq[k] : 0.0));
    for (const auto& [k, p] : freq) tv += exact.contains(k) ? 0.0 : p;
    CHECK(tv / 2.0 < 0.01);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const auto params = GenerationParams::alpha_pa(50, 40, 3, 0.5);
  Rng a(99), b(99);
  CHECK(generate_ground_truth(params, a).graph == generate_ground_truth(params, b).graph);
}
