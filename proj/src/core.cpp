#include "deanon/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace deanon {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::AlphaPA: return "alpha_pa";
    case ModelKind::StochasticBlock: return "sb";
    case ModelKind::IEE: return "iee";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "alpha_pa" || name == "ALPHA_PA" || name == "pa") return ModelKind::AlphaPA;
  if (name == "sb" || name == "SB") return ModelKind::StochasticBlock;
  if (name == "iee" || name == "IEE") return ModelKind::IEE;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

void GenerationParams::validate() const {
  if (n == 0 || m == 0) throw std::invalid_argument("generation: n and m must be positive");
  if (mu == 0) throw std::invalid_argument("generation: mu must be >= 1");
  if (tau0.size() != n) throw std::invalid_argument("generation: tau0 must have n entries");
  for (double t : tau0) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("generation: tau0 entries must be positive");
  }
  switch (model) {
    case ModelKind::AlphaPA:
      if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("generation: alpha must lie in (0, 1]");
      if (std::any_of(tau0.begin(), tau0.end(), [](double t) { return t != 1.0; }))
        throw std::invalid_argument("generation: alpha-PA requires tau0 == 1 for every group");
      break;
    case ModelKind::IEE:
      if (std::any_of(tau0.begin(), tau0.end(), [&](double t) { return t != tau0.front(); }))
        throw std::invalid_argument("generation: IEE requires equal tau0");
      break;
    case ModelKind::StochasticBlock:
      break;
  }
}

GenerationParams GenerationParams::alpha_pa(std::size_t n, std::size_t m, std::size_t mu, double alpha) {
  GenerationParams p{n, m, mu, alpha, std::vector<double>(n, 1.0), ModelKind::AlphaPA};
  p.validate();
  return p;
}

GenerationParams GenerationParams::stochastic_block(std::size_t m, std::size_t mu, std::vector<double> tau0) {
  GenerationParams p{tau0.size(), m, mu, 0.0, std::move(tau0), ModelKind::StochasticBlock};
  p.validate();
  return p;
}

GenerationParams GenerationParams::iee(std::size_t n, std::size_t m, std::size_t mu) {
  GenerationParams p{n, m, mu, 0.0, std::vector<double>(n, 1.0), ModelKind::IEE};
  p.validate();
  return p;
}

double edge_prior(const GenerationParams& params) {
  return static_cast<double>(params.mu) / static_cast<double>(params.m);
}

std::vector<double> community_edge_priors(const GenerationParams& params) {
  const double total = std::accumulate(params.tau0.begin(), params.tau0.end(), 0.0);
  const double scale = static_cast<double>(params.mu) / params.beta();
  std::vector<double> out(params.tau0.size());
  std::transform(params.tau0.begin(), params.tau0.end(), out.begin(),
                 [&](double t) { return t / total * scale; });
  return out;
}

// ---------------------------------------------------------------------------

BipartiteGraph::BipartiteGraph(std::size_t num_users, std::size_t num_groups,
                               std::vector<std::pair<UserId, GroupId>> edges)
    : members_(num_groups), groups_of_(num_users), num_edges_(edges.size()) {
  for (const auto& [k, j] : edges) {
    if (k >= num_users || j >= num_groups)
      throw std::out_of_range("graph: edge (" + std::to_string(k) + ", " + std::to_string(j) + ") out of range");
    members_[j].push_back(k);
    groups_of_[k].push_back(j);
  }
  for (auto& list : members_) std::sort(list.begin(), list.end());
  for (auto& list : groups_of_) std::sort(list.begin(), list.end());
  for (const auto& list : members_) {
    if (std::adjacent_find(list.begin(), list.end()) != list.end())
      throw std::invalid_argument("graph: duplicate edge");
  }
}

BipartiteGraph BipartiteGraph::from_members(std::size_t num_users, std::vector<std::vector<UserId>> members) {
  std::vector<std::pair<UserId, GroupId>> edges;
  for (std::size_t j = 0; j < members.size(); ++j) {
    for (UserId k : members[j]) edges.emplace_back(k, static_cast<GroupId>(j));
  }
  return BipartiteGraph(num_users, members.size(), std::move(edges));
}

bool BipartiteGraph::has_edge(UserId k, GroupId j) const {
  const auto& row = groups_of_.at(k);
  const auto& col = members_.at(j);
  if (row.size() <= col.size()) return std::binary_search(row.begin(), row.end(), j);
  return std::binary_search(col.begin(), col.end(), k);
}

std::vector<std::uint8_t> BipartiteGraph::fingerprint(UserId k, std::span<const GroupId> groups) const {
  if (k >= num_users()) throw std::out_of_range("fingerprint: user index out of range");
  std::vector<std::uint8_t> bits;
  bits.reserve(groups.size());
  const auto& row = groups_of_[k];
  for (GroupId j : groups) {
    if (j >= num_groups()) throw std::out_of_range("fingerprint: group index out of range");
    bits.push_back(std::binary_search(row.begin(), row.end(), j) ? 1 : 0);
  }
  return bits;
}

std::vector<std::uint8_t> BipartiteGraph::fingerprint(UserId k) const {
  if (k >= num_users()) throw std::out_of_range("fingerprint: user index out of range");
  std::vector<std::uint8_t> bits(num_groups(), 0);
  for (GroupId j : groups_of_[k]) bits[j] = 1;
  return bits;
}

void BipartiteGraph::column(GroupId j, std::vector<std::uint8_t>& out) const {
  out.assign(num_users(), 0);
  for (UserId k : members_.at(j)) out[k] = 1;
}

// ---------------------------------------------------------------------------

BinaryChannel::BinaryChannel(const Matrix& p) : p_(p) {
  for (const auto& row : p_) {
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("channel: entries must lie in [0, 1]");
    }
    if (std::abs(row[0] + row[1] - 1.0) > 1e-12) throw std::invalid_argument("channel: rows must sum to 1");
  }
}

void NoiseModel::validate(std::size_t num_users) const {
  if (gamma_channels.empty() || theta_channels.empty())
    throw std::invalid_argument("noise: gamma and theta channel sets must be nonempty");
  if (gamma_of_user.size() != num_users || theta_of_user.size() != num_users)
    throw std::invalid_argument("noise: per-user assignments must cover every user");
  for (auto g : gamma_of_user) {
    if (g >= gamma_channels.size()) throw std::invalid_argument("noise: undefined gamma label");
  }
  for (auto t : theta_of_user) {
    if (t >= theta_channels.size()) throw std::invalid_argument("noise: undefined theta label");
  }
}

NoiseModel NoiseModel::noiseless(std::size_t num_users) {
  NoiseModel model;
  model.gamma_channels.push_back({"noiseless", BinaryChannel()});
  model.theta_channels.push_back({"noiseless", BinaryChannel()});
  model.gamma_of_user.assign(num_users, 0);
  model.theta_of_user.assign(num_users, 0);
  return model;
}

// ---------------------------------------------------------------------------

VictimDistribution::VictimDistribution(std::vector<double> weights, VictimKind kind)
    : weights_(std::move(weights)), kind_(kind) {
  if (weights_.empty()) throw std::invalid_argument("victim: distribution needs at least one user");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("victim: weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("victim: weights must not all be zero");
  const double m = static_cast<double>(weights_.size());
  for (double& w : weights_) w *= m / total;
  lambda_cap_ = *std::max_element(weights_.begin(), weights_.end()) + 1.0;

  cdf_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    acc += weights_[k] / m;
    cdf_[k] = acc;
  }
  cdf_.back() = 1.0;
}

VictimDistribution VictimDistribution::uniform(std::size_t m) {
  return VictimDistribution(std::vector<double>(m, 1.0), VictimKind::Uniform);
}

VictimDistribution VictimDistribution::zipf(std::size_t m, double exponent) {
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) w[k] = std::pow(static_cast<double>(k + 1), -exponent);
  return VictimDistribution(std::move(w), VictimKind::ZipfNormalized);
}

VictimDistribution VictimDistribution::custom(std::vector<double> weights) {
  return VictimDistribution(std::move(weights), VictimKind::Custom);
}

UserId VictimDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  auto k = static_cast<std::size_t>(it - cdf_.begin());
  if (k >= cdf_.size()) k = cdf_.size() - 1;
  // Zero-weight users share a cdf value with their predecessor and are never returned.
  return static_cast<UserId>(k);
}

}  // namespace deanon
