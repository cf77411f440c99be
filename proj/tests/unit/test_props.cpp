#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "deanon/propositions.hpp"

using namespace deanon;

namespace {

props::PropositionOptions small_options() {
  props::PropositionOptions o;
  o.samples = 400;
  o.bootstrap = 50;
  o.psi_grid = {1.0, 2.0};
  o.pattern_lengths = {2};
  o.seed = 5;
  // a 400-graph run cannot resolve the rare all-ones pattern against the envelope
  o.min_expected_count = 5000.0;
  return o;
}

}  // namespace

TEST_CASE("group-size moments for uniform independent memberships") {
  // each user lands in group i with probability mu/n, so D_i is close to Binomial(m, mu/n)
  const auto params = GenerationParams::iee(200, 200, 3);
  const auto r = props::verify_propositions(params, small_options());
  const double p = 3.0 / 200.0;
  const double skip_share = double(r.moments.skipped_steps) / (400.0 * 600.0);
  CHECK(skip_share < 0.02);
  CHECK(std::abs(r.moments.mean_size.mean - 3.0) < 0.1);
  CHECK(std::abs(r.moments.mean_square.mean - (200 * p * (1 - p) + 9.0)) < 0.4);
  CHECK(std::abs(r.moments.mean_cross.mean - 9.0) < 0.4);
  CHECK(r.envelope == "sb");
}

TEST_CASE("report structure and determinism") {
  const auto params = GenerationParams::alpha_pa(200, 200, 3, 1.0);
  const auto a = props::verify_propositions(params, small_options());
  const auto b = props::verify_propositions(params, small_options());
  CHECK(a.samples == 400);
  CHECK(a.envelope == "sandwich");
  REQUIRE(a.tail.size() == 2);
  CHECK(a.tail[0].psi == 1.0);
  CHECK(a.tail[0].threshold == doctest::Approx(6.0));
  CHECK(a.tail[0].empirical <= a.tail[0].bound);
  CHECK(a.factorization.size() == 4);
  for (const auto& c : a.factorization) {
    CHECK(c.pattern.size() == 2);
    CHECK(c.lower <= c.upper);
  }
  CHECK(a.moments.mean_square.mean == b.moments.mean_square.mean);
  CHECK(a.tail[1].empirical == b.tail[1].empirical);
  CHECK(a.consistent());
}

TEST_CASE("rejects empty sampling") {
  auto o = small_options();
  o.samples = 0;
  CHECK_THROWS(props::verify_propositions(GenerationParams::alpha_pa(20, 20, 2, 1.0), o));
}
