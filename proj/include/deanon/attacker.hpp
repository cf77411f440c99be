#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deanon/channel.hpp"
#include "deanon/core.hpp"
#include "deanon/rng.hpp"

namespace deanon {

enum class ItsVariant {
  NoiselessQuery,   // single scan channel, noiseless responses
  StochasticBlock,  // community-ordered queries, per-community priors
  Compound,         // unknown scan channel among a finite set, known query channel
};

enum class QueryOrder { Index, CommunityPopularityDesc };

std::string to_string(ItsVariant variant);
ItsVariant its_variant_from_string(const std::string& name);
std::string to_string(QueryOrder order);
QueryOrder query_order_from_string(const std::string& name);

struct ItsConfig {
  double epsilon = 0.01;
  ItsVariant variant = ItsVariant::NoiselessQuery;
  QueryOrder order = QueryOrder::Index;
  std::size_t min_queries_floor = 0;
  /// Hard cap on queries; unset means n.
  std::optional<std::size_t> max_queries;

  /// ln(1 / epsilon).
  double threshold() const;
  void validate() const;

  /// Config with the variant's default query order.
  static ItsConfig make(ItsVariant variant, double epsilon);
};

/// Fixed query sequence: a permutation of the groups.
class QueryPlan {
 public:
  /// Index order, or groups sorted by descending community popularity with ties
  /// broken by ascending index. `group_tau0` is required for community order.
  QueryPlan(const ItsConfig& config, std::size_t num_groups, std::span<const double> group_tau0 = {});

  std::size_t size() const { return order_.size(); }
  /// Group queried at 0-based step t; throws std::out_of_range for t >= n.
  GroupId next(std::size_t t) const;
  std::span<const GroupId> order() const { return order_; }

 private:
  std::vector<GroupId> order_;
};

/// Log-likelihood-ratio increment for one (scanned bit, response) cell.
/// A zero-likelihood cell eliminates the hypothesis instead of adding -inf.
struct Increment {
  enum class Kind { Finite, Eliminates, Undefined };
  Kind kind = Kind::Finite;
  double value = 0.0;

  static Increment finite(double v) { return {Kind::Finite, v}; }
  static Increment eliminates() { return {Kind::Eliminates, 0.0}; }
  static Increment undefined() { return {Kind::Undefined, 0.0}; }
};

/// Increments indexed [scanned bit f][response y].
using IncrementTable = std::array<std::array<Increment, 2>, 2>;

/// ln(P(E0=y | Es=f) / P(E0=y)): noiseless responses, scan channel known.
IncrementTable increments_noiseless_query(double edge_prior, const BinaryChannel& scan);

/// ln(P^{gamma,theta}(y | f) / P^theta(y)) where the response passes the true
/// bit through the query channel: P^{gamma,theta}(y|f) = sum_s P^gamma(E0=s | Es=f) P^theta(y | s).
IncrementTable increments_compound(double edge_prior, const BinaryChannel& scan, const BinaryChannel& query);

/// Running information values I_t(k), one log-likelihood column per scan
/// hypothesis. I_t(k) = I_0(k) + max over live columns; a user whose columns
/// are all eliminated has no information value.
class InformationState {
 public:
  InformationState(const VictimDistribution& victims, std::size_t columns = 1);

  std::size_t num_users() const { return initial_.size(); }
  std::size_t num_columns() const { return columns_; }
  std::size_t queries() const { return queries_; }

  double initial(UserId k) const { return initial_.at(k); }
  /// I_t(k); nullopt once every column of user k has been eliminated.
  std::optional<double> value(UserId k) const;
  /// Cumulative log ratio of one column, excluding I_0(k).
  std::optional<double> column_sum(UserId k, std::size_t column) const;
  bool eliminated(UserId k) const { return !value(k).has_value(); }

  /// Adds the per-column increment for (bits[k], response) to every user.
  /// Throws std::domain_error if an undefined cell is hit.
  void apply(std::span<const std::uint8_t> bits, std::uint8_t response, std::span<const IncrementTable> tables);

 private:
  std::vector<double> initial_;
  std::vector<double> sums_;          // [k * columns + c]
  std::vector<std::uint8_t> alive_;   // [k * columns + c]
  std::vector<std::uint8_t> any_alive_;
  std::size_t columns_;
  std::size_t queries_ = 0;
};

void info_update_t1(InformationState& state, std::span<const std::uint8_t> scanned_bits, std::uint8_t response,
                    double edge_prior, const BinaryChannel& scan);

/// `community_prior` is P^tau(E0 = 1) for the community of the queried group.
void info_update_t2(InformationState& state, std::span<const std::uint8_t> scanned_bits, std::uint8_t response,
                    double community_prior, const BinaryChannel& scan);

void info_update_t3(InformationState& state, std::span<const std::uint8_t> scanned_bits, std::uint8_t response,
                    double edge_prior, std::span<const BinaryChannel> scan_channels, const BinaryChannel& query);

/// The unique user whose information value exceeds ln(1/epsilon), if exactly
/// one does and at least `min_queries` queries have been made.
std::optional<UserId> identify(const InformationState& state, double epsilon, std::size_t min_queries = 0);

/// Everything the attack needs besides the victim.
struct AttackSetup {
  const BipartiteGraph* truth = nullptr;
  const BipartiteGraph* scanned = nullptr;
  const NoiseModel* noise = nullptr;
  const VictimDistribution* victims = nullptr;
  ItsConfig config;
  /// P(E0 = 1) used by the noiseless-query and compound variants.
  double edge_prior = 0.0;
  /// Per-group tau0 (community popularity); required for community order.
  std::vector<double> group_tau0;
  /// Per-group P^tau(E0 = 1); required for the stochastic-block variant.
  std::vector<double> group_priors;

  void validate() const;
};

/// Builds the setup from the generation parameters (priors mu/m, community priors).
AttackSetup make_attack_setup(const BipartiteGraph& truth, const BipartiteGraph& scanned, const NoiseModel& noise,
                              const VictimDistribution& victims, const ItsConfig& config,
                              const GenerationParams& params);

/// Query, update, identify until a unique threshold crossing or the query cap.
/// `rng` drives the query-response noise only.
AttackOutcome run_attack(const AttackSetup& setup, UserId victim, Rng& rng);

}  // namespace deanon
