#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deanon/rng.hpp"

namespace deanon {

using UserId = std::uint32_t;
using GroupId = std::uint32_t;

enum class ModelKind { AlphaPA, StochasticBlock, IEE };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Parameters of the ground-truth growth process.
///
/// `mu` is the mean group size, so the process runs `delta() == mu * n` steps.
/// For the stochastic-block family the growth exponent is irrelevant and is
/// stored as 0.
struct GenerationParams {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t mu = 1;
  double alpha = 1.0;
  std::vector<double> tau0;
  ModelKind model = ModelKind::AlphaPA;

  std::size_t delta() const { return mu * n; }
  double beta() const { return static_cast<double>(m) / static_cast<double>(n); }

  /// Throws std::invalid_argument when any model invariant is violated.
  void validate() const;

  static GenerationParams alpha_pa(std::size_t n, std::size_t m, std::size_t mu, double alpha);
  static GenerationParams stochastic_block(std::size_t m, std::size_t mu, std::vector<double> tau0);
  static GenerationParams iee(std::size_t n, std::size_t m, std::size_t mu);
};

/// P(E0 = 1) = mu / m, the attacker's prior that a given user-group edge exists.
double edge_prior(const GenerationParams& params);

/// Per-group Bernoulli parameter under the stochastic-block model:
/// tau_j / (sum_j' tau_j') * mu / beta.
std::vector<double> community_edge_priors(const GenerationParams& params);

/// User/group membership graph, indexed both ways.
///
/// Member lists and group lists are sorted and mutually consistent; the
/// constructor rejects duplicate or out-of-range edges.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::size_t num_users, std::size_t num_groups,
                 std::vector<std::pair<UserId, GroupId>> edges);
  /// Builds from per-group member lists (any order, duplicates rejected).
  static BipartiteGraph from_members(std::size_t num_users, std::vector<std::vector<UserId>> members);

  std::size_t num_users() const { return groups_of_.size(); }
  std::size_t num_groups() const { return members_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  std::span<const UserId> members(GroupId j) const { return members_.at(j); }
  std::span<const GroupId> groups_of(UserId k) const { return groups_of_.at(k); }
  std::size_t group_size(GroupId j) const { return members_.at(j).size(); }

  bool has_edge(UserId k, GroupId j) const;

  /// (R_{k,j})_{j in groups}: membership bits of user k restricted to `groups`.
  std::vector<std::uint8_t> fingerprint(UserId k, std::span<const GroupId> groups) const;
  std::vector<std::uint8_t> fingerprint(UserId k) const;

  /// Dense column of membership bits for group j over all users.
  void column(GroupId j, std::vector<std::uint8_t>& out) const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  std::vector<std::vector<UserId>> members_;
  std::vector<std::vector<GroupId>> groups_of_;
  std::size_t num_edges_ = 0;
};

/// Conditional distribution p[in][out] of a binary channel.
class BinaryChannel {
 public:
  using Matrix = std::array<std::array<double, 2>, 2>;

  /// Noiseless channel.
  BinaryChannel() : p_{{{1.0, 0.0}, {0.0, 1.0}}} {}
  /// Throws std::invalid_argument unless every row is a distribution (within 1e-12).
  explicit BinaryChannel(const Matrix& p);

  double operator()(int out, int in) const { return p_[in][out]; }
  const Matrix& matrix() const { return p_; }

  friend bool operator==(const BinaryChannel&, const BinaryChannel&) = default;

 private:
  Matrix p_;
};

struct LabeledChannel {
  std::string label;
  BinaryChannel channel;
};

/// Per-user scan channels (gamma) and query channels (theta).
///
/// The attacker learns theta(victim) at query time but never gamma(k); only the
/// set of gamma channels is public.
struct NoiseModel {
  std::vector<LabeledChannel> gamma_channels;
  std::vector<LabeledChannel> theta_channels;
  std::vector<std::uint32_t> gamma_of_user;
  std::vector<std::uint32_t> theta_of_user;

  static constexpr bool attacker_knows_theta = true;
  static constexpr bool attacker_knows_gamma = false;

  void validate(std::size_t num_users) const;

  const BinaryChannel& scan_channel(UserId k) const { return gamma_channels.at(gamma_of_user.at(k)).channel; }
  const BinaryChannel& query_channel(UserId k) const { return theta_channels.at(theta_of_user.at(k)).channel; }

  /// Noiseless scan and noiseless query for every user.
  static NoiseModel noiseless(std::size_t num_users);
};

enum class VictimKind { Uniform, ZipfNormalized, Custom };

/// P_M(k) = c_k / m with sum_k c_k = m.
class VictimDistribution {
 public:
  static VictimDistribution uniform(std::size_t m);
  /// c_k proportional to 1 / (k + 1)^exponent.
  static VictimDistribution zipf(std::size_t m, double exponent);
  /// Arbitrary nonnegative weights, rescaled so they sum to m.
  static VictimDistribution custom(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  VictimKind kind() const { return kind_; }
  double weight(UserId k) const { return weights_.at(k); }
  double probability(UserId k) const { return weights_.at(k) / static_cast<double>(weights_.size()); }
  std::span<const double> weights() const { return weights_; }
  /// Recorded only; any lambda with max_k c_k < lambda is admissible.
  double lambda_cap() const { return lambda_cap_; }

  UserId sample(Rng& rng) const;

 private:
  VictimDistribution(std::vector<double> weights, VictimKind kind);

  std::vector<double> weights_;
  std::vector<double> cdf_;
  double lambda_cap_ = 0.0;
  VictimKind kind_ = VictimKind::Uniform;
};

struct QueryRecord {
  GroupId group = 0;
  std::uint8_t response = 0;
  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

struct AttackOutcome {
  std::optional<UserId> identified;
  UserId victim = 0;
  std::size_t num_queries = 0;
  std::vector<QueryRecord> transcript;
  bool correct = false;
  bool exhausted = false;
};

}  // namespace deanon
