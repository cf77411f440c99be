#include <algorithm>
#include <stdexcept>

#include "deanon/generator.hpp"

namespace deanon {

namespace {

struct Enumerator {
  const GenerationParams& params;
  std::map<EdgeSetKey, double>& out;

  void run(std::size_t step, const PopularityState& state, const std::vector<std::vector<UserId>>& members,
           double probability) {
    if (step == params.delta()) {
      EdgeSetKey key;
      for (GroupId j = 0; j < members.size(); ++j) {
        for (UserId k : members[j]) key.push_back(static_cast<std::uint64_t>(j) * params.m + k);
      }
      std::sort(key.begin(), key.end());
      out[key] += probability;
      return;
    }
    for (GroupId j = 0; j < params.n; ++j) {
      const double pj = selection_probability(state, j);
      if (pj == 0.0) continue;
      PopularityState next_state = state;
      next_state.select(j);
      const auto& list = members[j];
      if (list.size() == params.m) {
        run(step + 1, next_state, members, probability * pj);
        continue;
      }
      const double pk = 1.0 / static_cast<double>(params.m - list.size());
      for (UserId k = 0; k < params.m; ++k) {
        if (std::binary_search(list.begin(), list.end(), k)) continue;
        auto next_members = members;
        auto& target = next_members[j];
        target.insert(std::lower_bound(target.begin(), target.end(), k), k);
        run(step + 1, next_state, next_members, probability * pj * pk);
      }
    }
  }
};

}  // namespace

std::map<EdgeSetKey, double> brute_force_generation_distribution(const GenerationParams& params,
                                                                 std::uint64_t budget) {
  params.validate();
  const std::uint64_t branching = static_cast<std::uint64_t>(params.n) * params.m;
  std::uint64_t trajectories = 1;
  for (std::size_t t = 0; t < params.delta(); ++t) {
    if (trajectories > budget / branching) {
      throw std::invalid_argument("brute_force_generation_distribution: (n*m)^delta exceeds the enumeration budget");
    }
    trajectories *= branching;
  }
  std::map<EdgeSetKey, double> out;
  Enumerator enumerator{params, out};
  enumerator.run(0, PopularityState(params), std::vector<std::vector<UserId>>(params.n), 1.0);
  return out;
}

}  // namespace deanon
