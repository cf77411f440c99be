#include "deanon/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace deanon {

PrefixSumTree::PrefixSumTree(const std::vector<double>& weights) : tree_(weights) {
  const std::size_t n = tree_.size();
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= n) tree_[parent - 1] += tree_[i - 1];
  }
  top_bit_ = n == 0 ? 0 : std::bit_floor(n);
}

void PrefixSumTree::add(std::size_t index, double delta) {
  for (std::size_t i = index + 1; i <= tree_.size(); i += i & (~i + 1)) tree_[i - 1] += delta;
}

double PrefixSumTree::prefix(std::size_t index) const {
  double sum = 0.0;
  for (std::size_t i = index; i > 0; i -= i & (~i + 1)) sum += tree_[i - 1];
  return sum;
}

std::size_t PrefixSumTree::find(double target) const {
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next <= tree_.size() && tree_[next - 1] <= target) {
      pos = next;
      target -= tree_[next - 1];
    }
  }
  return std::min(pos, tree_.size() - 1);
}

// ---------------------------------------------------------------------------

PopularityState::PopularityState(const GenerationParams& params)
    : model_(params.model),
      alpha_(params.alpha),
      tau_(params.tau0),
      tau0_(params.tau0),
      selections_(params.tau0.size(), 0),
      tree_(params.tau0) {
  for (double t : tau_) total_ += t;
}

GroupId PopularityState::sample(Rng& rng) const {
  return static_cast<GroupId>(tree_.find(rng.uniform() * total_));
}

void PopularityState::select(GroupId j) {
  ++selections_.at(j);
  const double updated = popularity_update(model_, tau_[j], tau0_[j], selections_[j], alpha_);
  const double delta = updated - tau_[j];
  if (delta != 0.0) {
    tau_[j] = updated;
    tree_.add(j, delta);
    total_ += delta;
  }
}

double selection_probability(const PopularityState& state, GroupId j) {
  return state.tau(j) / state.total();
}

double popularity_update(ModelKind model, double tau_prev, double tau0, std::size_t size, double alpha) {
  if (model != ModelKind::AlphaPA) return tau_prev;
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("popularity_update: alpha must lie in (0, 1]");
  if (size == 0) throw std::invalid_argument("popularity_update: group size must be at least 1");
  if (alpha == 1.0) return static_cast<double>(size) + tau0;
  return std::pow(static_cast<double>(size), alpha) + tau0;
}

double popularity_step(double tau_prev, double tau0, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("popularity_step: alpha must lie in (0, 1]");
  const double base = std::max(tau_prev - tau0, 0.0);
  return std::pow(std::pow(base, 1.0 / alpha) + 1.0, alpha) + tau0;
}

// ---------------------------------------------------------------------------

namespace {

// Uniform draw from [m] minus the sorted member list; the list must not be full.
UserId sample_non_member(const std::vector<UserId>& members, std::size_t m, Rng& rng) {
  if (2 * members.size() <= m) {
    for (;;) {
      const auto candidate = static_cast<UserId>(rng.below(m));
      if (!std::binary_search(members.begin(), members.end(), candidate)) return candidate;
    }
  }
  auto candidate = static_cast<UserId>(rng.below(m - members.size()));
  for (UserId member : members) {
    if (member > candidate) break;
    ++candidate;
  }
  return candidate;
}

}  // namespace

GroundTruth generate_ground_truth(const GenerationParams& params, Rng& rng, const StepObserver& observer) {
  params.validate();
  const std::size_t m = params.m;
  PopularityState state(params);
  std::vector<std::vector<UserId>> members(params.n);
  GroundTruth out;

  for (std::size_t step = 0; step < params.delta(); ++step) {
    if (observer) observer(step, state);
    const GroupId j = state.sample(rng);
    auto& list = members[j];
    if (list.size() == m) {
      out.skipped_steps.push_back(step);
    } else {
      const UserId k = sample_non_member(list, m, rng);
      list.insert(std::lower_bound(list.begin(), list.end(), k), k);
    }
    state.select(j);
  }
  out.graph = BipartiteGraph::from_members(m, std::move(members));
  return out;
}

EdgeSetKey edge_set_key(const BipartiteGraph& graph) {
  EdgeSetKey key;
  key.reserve(graph.num_edges());
  for (GroupId j = 0; j < graph.num_groups(); ++j) {
    for (UserId k : graph.members(j)) key.push_back(static_cast<std::uint64_t>(j) * graph.num_users() + k);
  }
  return key;
}

}  // namespace deanon
