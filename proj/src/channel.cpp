#include "deanon/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deanon::channels {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// x ln(x / y) with 0 ln(0 / y) = 0.
double xlogx_over(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

BinaryChannel identity() { return BinaryChannel(); }

BinaryChannel bsc(double p) {
  check_probability(p, "bsc crossover");
  return BinaryChannel({{{1.0 - p, p}, {p, 1.0 - p}}});
}

BinaryChannel omission(double s) {
  check_probability(s, "omission probability");
  return BinaryChannel({{{1.0, 0.0}, {s, 1.0 - s}}});
}

BinaryChannel constant(double q) {
  check_probability(q, "constant channel output probability");
  return BinaryChannel({{{1.0 - q, q}, {1.0 - q, q}}});
}

BinaryChannel mixture(double w, const BinaryChannel& a, const BinaryChannel& b) {
  check_probability(w, "mixture weight");
  BinaryChannel::Matrix p{};
  for (int in = 0; in < 2; ++in) {
    p[in][1] = w * a(1, in) + (1.0 - w) * b(1, in);
    p[in][0] = 1.0 - p[in][1];
  }
  return BinaryChannel(p);
}

BinaryChannel compose(const BinaryChannel& first, const BinaryChannel& second) {
  BinaryChannel::Matrix p{};
  for (int in = 0; in < 2; ++in) {
    p[in][1] = first(0, in) * second(1, 0) + first(1, in) * second(1, 1);
    p[in][0] = 1.0 - p[in][1];
  }
  return BinaryChannel(p);
}

BipartiteGraph scan_graph(const BipartiteGraph& truth, const NoiseModel& noise, Rng& rng) {
  noise.validate(truth.num_users());
  const std::size_t n = truth.num_groups();
  std::vector<std::pair<UserId, GroupId>> edges;
  edges.reserve(truth.num_edges());
  std::vector<std::uint8_t> row;
  for (UserId k = 0; k < truth.num_users(); ++k) {
    const BinaryChannel& ch = noise.scan_channel(k);
    const double keep = ch(1, 1);
    const double spurious = ch(1, 0);
    row.assign(n, 0);
    for (GroupId j : truth.groups_of(k)) row[j] = 1;
    for (GroupId j = 0; j < n; ++j) {
      const double p1 = row[j] ? keep : spurious;
      bool present;
      if (p1 == 0.0) {
        present = false;
      } else if (p1 == 1.0) {
        present = true;
      } else {
        present = rng.bernoulli(p1);
      }
      if (present) edges.emplace_back(k, j);
    }
  }
  return BipartiteGraph(truth.num_users(), n, std::move(edges));
}

std::uint8_t query_response(std::uint8_t true_bit, const BinaryChannel& channel, Rng& rng) {
  if (true_bit > 1) throw std::invalid_argument("query_response: bit must be 0 or 1");
  const double p1 = channel(1, true_bit);
  if (p1 == 0.0) return 0;
  if (p1 == 1.0) return 1;
  return rng.bernoulli(p1) ? 1 : 0;
}

double Posterior::operator()(int in, int out) const {
  if (!defined[out]) throw std::domain_error("posterior undefined for an output symbol of probability zero");
  return given_out[out][in];
}

BinaryChannel Posterior::as_channel() const {
  if (!defined[0] || !defined[1]) throw std::domain_error("posterior undefined for an output symbol of probability zero");
  return BinaryChannel(given_out);
}

Posterior posterior(double p1, const BinaryChannel& channel) {
  check_probability(p1, "prior");
  const std::array<double, 2> prior{1.0 - p1, p1};
  Posterior post;
  for (int out = 0; out < 2; ++out) {
    const double joint0 = prior[0] * channel(out, 0);
    const double joint1 = prior[1] * channel(out, 1);
    const double marginal = joint0 + joint1;
    if (marginal > 0.0) {
      post.defined[out] = true;
      post.given_out[out] = {joint0 / marginal, joint1 / marginal};
    }
  }
  return post;
}

double output_probability(double p1, const BinaryChannel& channel) {
  check_probability(p1, "prior");
  return (1.0 - p1) * channel(1, 0) + p1 * channel(1, 1);
}

double binary_entropy(double p) {
  check_probability(p, "entropy argument");
  return -xlogx_over(p, 1.0) - xlogx_over(1.0 - p, 1.0);
}

double mutual_information(double p1, const BinaryChannel& channel) {
  check_probability(p1, "prior");
  const std::array<double, 2> prior{1.0 - p1, p1};
  const double q1 = output_probability(p1, channel);
  const std::array<double, 2> out_marginal{1.0 - q1, q1};
  double info = 0.0;
  for (int in = 0; in < 2; ++in) {
    for (int out = 0; out < 2; ++out) {
      const double joint = prior[in] * channel(out, in);
      if (joint > 0.0) info += joint * std::log(channel(out, in) / out_marginal[out]);
    }
  }
  return std::max(info, 0.0);
}

double binary_kl(double p, double q) {
  check_probability(p, "kl argument p");
  check_probability(q, "kl argument q");
  if ((q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0)) return kInfinity;
  return xlogx_over(p, q) + xlogx_over(1.0 - p, 1.0 - q);
}

double i_max(double p1, const BinaryChannel& channel) {
  check_probability(p1, "prior");
  if (p1 == 0.0 || p1 == 1.0) return kInfinity;
  const Posterior post = posterior(p1, channel);
  const std::array<double, 2> prior{1.0 - p1, p1};
  double best = -kInfinity;
  for (int f = 0; f < 2; ++f) {
    if (!post.defined[f]) continue;
    for (int y = 0; y < 2; ++y) {
      const double ratio = post.given_out[f][y] / prior[y];
      if (ratio > 0.0) best = std::max(best, std::log(ratio));
    }
  }
  return best;
}

}  // namespace deanon::channels
