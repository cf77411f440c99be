#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "deanon/core.hpp"
#include "deanon/rng.hpp"

namespace deanon {

/// Fenwick tree over nonnegative weights: point update, prefix sum and
/// inverse-CDF lookup in O(log n).
class PrefixSumTree {
 public:
  PrefixSumTree() = default;
  explicit PrefixSumTree(const std::vector<double>& weights);

  std::size_t size() const { return tree_.size(); }
  void add(std::size_t index, double delta);
  /// Sum of weights[0..index).
  double prefix(std::size_t index) const;
  /// Smallest index whose inclusive prefix sum exceeds `target`; target in [0, total).
  std::size_t find(double target) const;

 private:
  std::vector<double> tree_;
  std::size_t top_bit_ = 0;
};

/// Group popularities tau_j(t) during growth.
class PopularityState {
 public:
  explicit PopularityState(const GenerationParams& params);

  std::size_t size() const { return tau_.size(); }
  double tau(GroupId j) const { return tau_.at(j); }
  double tau0(GroupId j) const { return tau0_.at(j); }
  std::span<const double> taus() const { return tau_; }
  double total() const { return total_; }
  /// Number of times group j has been selected so far (skips included).
  std::size_t selections(GroupId j) const { return selections_.at(j); }
  const PrefixSumTree& tree() const { return tree_; }

  GroupId sample(Rng& rng) const;
  /// Records one selection of group j and applies the model's popularity update.
  void select(GroupId j);

 private:
  ModelKind model_;
  double alpha_;
  std::vector<double> tau_;
  std::vector<double> tau0_;
  std::vector<std::size_t> selections_;
  PrefixSumTree tree_;
  double total_ = 0.0;
};

/// tau_j(t-1) / sum_j' tau_j'(t-1).
double selection_probability(const PopularityState& state, GroupId j);

/// Popularity of a group right after it reaches `size` >= 1 members.
/// alpha-PA: size^alpha + tau0. Stochastic-block and IEE: tau_prev unchanged.
double popularity_update(ModelKind model, double tau_prev, double tau0, std::size_t size, double alpha);

/// The same update written as an iteration on the previous popularity,
/// ((tau_prev - tau0)^(1/alpha) + 1)^alpha + tau0.
double popularity_step(double tau_prev, double tau0, double alpha);

struct GroundTruth {
  BipartiteGraph graph;
  /// Steps (0-based) at which the chosen group already contained every user.
  std::vector<std::size_t> skipped_steps;
};

/// Called before each growth step with the step index and the current state.
using StepObserver = std::function<void(std::size_t step, const PopularityState& state)>;

/// Runs the delta-step growth process: pick a group by popularity, add a
/// uniformly chosen non-member, update the group's popularity.
GroundTruth generate_ground_truth(const GenerationParams& params, Rng& rng, const StepObserver& observer = {});

/// Final edge set encoded as sorted j * m + k codes.
using EdgeSetKey = std::vector<std::uint64_t>;
EdgeSetKey edge_set_key(const BipartiteGraph& graph);

/// Exact distribution over final graphs by enumerating every (group, user)
/// trajectory. Rejects instances with more than `budget` trajectories, where
/// the trajectory count is bounded by (n * m)^delta.
std::map<EdgeSetKey, double> brute_force_generation_distribution(const GenerationParams& params,
                                                                 std::uint64_t budget = 1'000'000);

}  // namespace deanon
