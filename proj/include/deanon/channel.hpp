#pragma once

#include <array>
#include <limits>

#include "deanon/core.hpp"
#include "deanon/rng.hpp"

namespace deanon::channels {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Constructors -------------------------------------------------------------

BinaryChannel identity();
/// Binary symmetric channel with crossover probability p.
BinaryChannel bsc(double p);
/// Membership is hidden with probability s; no false memberships:
/// P(out=1 | in=1) = 1 - s, P(out=1 | in=0) = 0.
BinaryChannel omission(double s);
/// Row-wise convex combination w * a + (1 - w) * b.
BinaryChannel mixture(double w, const BinaryChannel& a, const BinaryChannel& b);
/// Output independent of input, P(out=1) = q.
BinaryChannel constant(double q);

/// Sequential composition: in -> first -> second, P(y|x) = sum_s first(s|x) second(y|s).
BinaryChannel compose(const BinaryChannel& first, const BinaryChannel& second);

// Noise application ---------------------------------------------------------

/// Draws every scanned bit F_{k,j} independently from the scan channel of user k.
BipartiteGraph scan_graph(const BipartiteGraph& truth, const NoiseModel& noise, Rng& rng);

/// One noisy query answer for a true membership bit.
std::uint8_t query_response(std::uint8_t true_bit, const BinaryChannel& channel, Rng& rng);

// Bayes inversion -----------------------------------------------------------

/// Reverse channel P(in | out) under a Bernoulli(p1) input.
///
/// An output symbol that occurs with probability zero has no posterior; its row
/// is flagged undefined and reading it throws.
struct Posterior {
  std::array<std::array<double, 2>, 2> given_out{};  // [out][in]
  std::array<bool, 2> defined{};

  double operator()(int in, int out) const;
  /// The posterior as a channel from output back to input; throws if a row is undefined.
  BinaryChannel as_channel() const;
};

Posterior posterior(double p1, const BinaryChannel& channel);

/// P(out = 1) when the input is Bernoulli(p1).
double output_probability(double p1, const BinaryChannel& channel);

// Information functionals (natural logarithm throughout) --------------------

/// h(p) in nats, 0 ln 0 = 0.
double binary_entropy(double p);

/// I(in; out) in nats for a Bernoulli(p1) input.
double mutual_information(double p1, const BinaryChannel& channel);

/// D_b(p || q) in nats; +infinity when p puts mass where q has none.
double binary_kl(double p, double q);

/// Largest single-observation log ratio max_{y,f} ln(P(in=y | out=f) / P(in=y)),
/// taken over output symbols of positive probability. +infinity when the prior is
/// degenerate.
double i_max(double p1, const BinaryChannel& channel);

}  // namespace deanon::channels
