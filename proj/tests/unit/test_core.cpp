#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "deanon/core.hpp"

using namespace deanon;

TEST_CASE("generation params derive delta and beta") {
  const auto p = GenerationParams::alpha_pa(200, 100, 3, 0.5);
  CHECK(p.delta() == 600);
  CHECK(p.beta() == doctest::Approx(0.5));
  CHECK_NOTHROW(p.validate());
  CHECK(edge_prior(p) == doctest::Approx(0.03));
}

TEST_CASE("generation params reject broken invariants") {
  auto p = GenerationParams::alpha_pa(4, 10, 2, 1.0);
  p.alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.alpha = 1.0;
  p.tau0[1] = 2.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  auto iee = GenerationParams::iee(3, 10, 2);
  iee.tau0 = {1.0, 2.0, 1.0};
  CHECK_THROWS_AS(iee.validate(), std::invalid_argument);
  CHECK_THROWS_AS(GenerationParams::alpha_pa(0, 10, 1, 1.0).validate(), std::invalid_argument);
}

TEST_CASE("community priors") {
  std::vector<double> tau0(100, 1.0);
  for (int j = 0; j < 50; ++j) tau0[j] = 2.0;
  const auto p = GenerationParams::stochastic_block(100, 3, tau0);
  const auto pri = community_edge_priors(p);
  CHECK(pri[0] == doctest::Approx(0.04));
  CHECK(pri[99] == doctest::Approx(0.02));
}

TEST_CASE("bipartite graph stays consistent both ways") {
  BipartiteGraph g(3, 4, {{0, 1}, {0, 3}, {2, 1}, {1, 0}});
  CHECK(g.num_edges() == 4);
  CHECK(g.group_size(1) == 2);
  CHECK(g.has_edge(0, 3));
  CHECK_FALSE(g.has_edge(0, 2));
  std::size_t sum = 0;
  for (GroupId j = 0; j < g.num_groups(); ++j) {
    sum += g.group_size(j);
    for (UserId k : g.members(j)) {
      const auto groups = g.groups_of(k);
      CHECK(std::find(groups.begin(), groups.end(), j) != groups.end());
    }
  }
  CHECK(sum == g.num_edges());
  CHECK_THROWS_AS(BipartiteGraph(2, 2, {{0, 0}, {0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(BipartiteGraph(2, 2, {{2, 0}}), std::out_of_range);
  CHECK_THROWS_AS(BipartiteGraph::from_members(2, {{0, 0}}), std::invalid_argument);
}

TEST_CASE("fingerprints project the edge set") {
  // user 0 in groups 1 and 3 (1-based), n = 4
  BipartiteGraph g(2, 4, {{0, 0}, {0, 2}});
  CHECK(g.fingerprint(0) == std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK(g.fingerprint(1) == std::vector<std::uint8_t>{0, 0, 0, 0});
  const std::vector<GroupId> only{2};
  CHECK(g.fingerprint(0, only) == std::vector<std::uint8_t>{1});
  const std::vector<GroupId> bad{7};
  CHECK_THROWS(g.fingerprint(0, bad));
  CHECK_THROWS(g.fingerprint(5));
}

TEST_CASE("victim distributions normalize weights") {
  const auto custom = VictimDistribution::custom({2.0, 0.5, 0.5});
  CHECK(custom.probability(0) == doctest::Approx(2.0 / 3.0));
  CHECK(custom.probability(1) == doctest::Approx(1.0 / 6.0));
  double total = 0.0;
  for (double c : custom.weights()) total += c;
  CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(custom.lambda_cap() > 2.0);

  const auto zipf = VictimDistribution::zipf(3, 1.0);
  CHECK(zipf.probability(0) == doctest::Approx(6.0 / 11.0));
  CHECK(zipf.probability(1) == doctest::Approx(3.0 / 11.0));
  CHECK(zipf.probability(2) == doctest::Approx(2.0 / 11.0));

  CHECK_THROWS_AS(VictimDistribution::custom({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(VictimDistribution::custom({1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("victim sampling matches the distribution") {
  const auto dist = VictimDistribution::custom({2.0, 0.5, 0.5, 1.0});
  Rng rng(7);
  const int draws = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i) ++counts[dist.sample(rng)];
  for (UserId k = 0; k < 4; ++k) {
    const double p = dist.probability(k);
    CHECK(std::abs(counts[k] / double(draws) - p) <= 4.0 * std::sqrt(p * (1 - p) / draws));
  }

  const auto uni = VictimDistribution::uniform(4);
  std::vector<int> u(4, 0);
  for (int i = 0; i < draws; ++i) ++u[uni.sample(rng)];
  double chi2 = 0.0;
  for (int c : u) chi2 += (c - draws / 4.0) * (c - draws / 4.0) / (draws / 4.0);
  CHECK(chi2 < 11.345);  // 99% quantile, 3 degrees of freedom
}

TEST_CASE("noise model validation") {
  NoiseModel nm = NoiseModel::noiseless(3);
  CHECK_NOTHROW(nm.validate(3));
  CHECK_THROWS(nm.validate(4));
  nm.gamma_of_user[1] = 5;
  CHECK_THROWS(nm.validate(3));
  CHECK(NoiseModel::attacker_knows_theta);
  CHECK_FALSE(NoiseModel::attacker_knows_gamma);
}

TEST_CASE("rng streams are reproducible and path dependent") {
  Rng a = Rng::stream(42, {1, 2});
  Rng b = Rng::stream(42, {1, 2});
  Rng c = Rng::stream(42, {2, 1});
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(r.below(7) < 7);
  }
}
