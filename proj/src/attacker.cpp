#include "deanon/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace deanon {

std::string to_string(ItsVariant variant) {
  switch (variant) {
    case ItsVariant::NoiselessQuery: return "T1_NOISELESS_QUERY";
    case ItsVariant::StochasticBlock: return "T2_SB";
    case ItsVariant::Compound: return "T3_COMPOUND";
  }
  return "unknown";
}

ItsVariant its_variant_from_string(const std::string& name) {
  if (name == "T1_NOISELESS_QUERY" || name == "t1") return ItsVariant::NoiselessQuery;
  if (name == "T2_SB" || name == "t2") return ItsVariant::StochasticBlock;
  if (name == "T3_COMPOUND" || name == "t3") return ItsVariant::Compound;
  throw std::invalid_argument("unknown ITS variant '" + name + "'");
}

std::string to_string(QueryOrder order) {
  return order == QueryOrder::Index ? "INDEX_ORDER" : "COMMUNITY_POPULARITY_DESC";
}

QueryOrder query_order_from_string(const std::string& name) {
  if (name == "INDEX_ORDER" || name == "index") return QueryOrder::Index;
  if (name == "COMMUNITY_POPULARITY_DESC" || name == "community") return QueryOrder::CommunityPopularityDesc;
  throw std::invalid_argument("unknown query order '" + name + "'");
}

double ItsConfig::threshold() const { return std::log(1.0 / epsilon); }

void ItsConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("its: epsilon must lie in (0, 1)");
  if (variant == ItsVariant::StochasticBlock && order != QueryOrder::CommunityPopularityDesc)
    throw std::invalid_argument("its: the stochastic-block variant queries communities by descending popularity");
}

ItsConfig ItsConfig::make(ItsVariant variant, double epsilon) {
  ItsConfig config;
  config.epsilon = epsilon;
  config.variant = variant;
  config.order = variant == ItsVariant::StochasticBlock ? QueryOrder::CommunityPopularityDesc : QueryOrder::Index;
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------

QueryPlan::QueryPlan(const ItsConfig& config, std::size_t num_groups, std::span<const double> group_tau0)
    : order_(num_groups) {
  std::iota(order_.begin(), order_.end(), GroupId{0});
  if (config.order == QueryOrder::CommunityPopularityDesc) {
    if (group_tau0.size() != num_groups)
      throw std::invalid_argument("query plan: community order needs tau0 for every group");
    std::stable_sort(order_.begin(), order_.end(),
                     [&](GroupId a, GroupId b) { return group_tau0[a] > group_tau0[b]; });
  }
}

GroupId QueryPlan::next(std::size_t t) const {
  if (t >= order_.size()) throw std::out_of_range("query plan: every group has already been queried");
  return order_[t];
}

// ---------------------------------------------------------------------------

namespace {

Increment log_ratio(double numerator, double denominator) {
  if (denominator <= 0.0) return Increment::undefined();
  if (numerator <= 0.0) return Increment::eliminates();
  return Increment::finite(std::log(numerator / denominator));
}

}  // namespace

IncrementTable increments_noiseless_query(double edge_prior, const BinaryChannel& scan) {
  const channels::Posterior post = channels::posterior(edge_prior, scan);
  const std::array<double, 2> prior{1.0 - edge_prior, edge_prior};
  IncrementTable table{};
  for (int f = 0; f < 2; ++f) {
    for (int y = 0; y < 2; ++y) {
      table[f][y] = post.defined[f] ? log_ratio(post.given_out[f][y], prior[y]) : Increment::undefined();
    }
  }
  return table;
}

IncrementTable increments_compound(double edge_prior, const BinaryChannel& scan, const BinaryChannel& query) {
  const channels::Posterior post = channels::posterior(edge_prior, scan);
  const double response_one = channels::output_probability(edge_prior, query);
  const std::array<double, 2> response_marginal{1.0 - response_one, response_one};
  IncrementTable table{};
  for (int f = 0; f < 2; ++f) {
    for (int y = 0; y < 2; ++y) {
      if (!post.defined[f]) {
        table[f][y] = Increment::undefined();
        continue;
      }
      const double likelihood = post.given_out[f][0] * query(y, 0) + post.given_out[f][1] * query(y, 1);
      table[f][y] = log_ratio(likelihood, response_marginal[y]);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------

InformationState::InformationState(const VictimDistribution& victims, std::size_t columns)
    : initial_(victims.size()),
      sums_(victims.size() * columns, 0.0),
      alive_(victims.size() * columns, 1),
      any_alive_(victims.size(), 1),
      columns_(columns) {
  if (columns == 0) throw std::invalid_argument("information state: at least one column is required");
  for (UserId k = 0; k < initial_.size(); ++k) {
    const double p = victims.probability(k);
    if (p > 0.0) {
      initial_[k] = std::log(p);
    } else {
      initial_[k] = 0.0;
      any_alive_[k] = 0;
      std::fill_n(alive_.begin() + static_cast<std::ptrdiff_t>(k * columns_), columns_, 0);
    }
  }
}

std::optional<double> InformationState::value(UserId k) const {
  if (!any_alive_.at(k)) return std::nullopt;
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t base = static_cast<std::size_t>(k) * columns_;
  for (std::size_t c = 0; c < columns_; ++c) {
    if (alive_[base + c]) best = std::max(best, sums_[base + c]);
  }
  return best + initial_[k];
}

std::optional<double> InformationState::column_sum(UserId k, std::size_t column) const {
  const std::size_t idx = static_cast<std::size_t>(k) * columns_ + column;
  if (column >= columns_ || !alive_.at(idx)) return std::nullopt;
  return sums_[idx];
}

void InformationState::apply(std::span<const std::uint8_t> bits, std::uint8_t response,
                             std::span<const IncrementTable> tables) {
  if (bits.size() != num_users()) throw std::invalid_argument("information update: one scanned bit per user");
  if (tables.size() != columns_) throw std::invalid_argument("information update: one increment table per column");
  if (response > 1) throw std::invalid_argument("information update: response must be 0 or 1");

  // Increments for this response, laid out [f][column].
  std::array<std::vector<Increment>, 2> cell;
  for (int f = 0; f < 2; ++f) {
    cell[f].resize(columns_);
    for (std::size_t c = 0; c < columns_; ++c) cell[f][c] = tables[c][f][response];
  }

  for (std::size_t k = 0; k < num_users(); ++k) {
    if (!any_alive_[k]) continue;
    const std::uint8_t f = bits[k] ? 1 : 0;
    const std::size_t base = k * columns_;
    bool live = false;
    for (std::size_t c = 0; c < columns_; ++c) {
      if (!alive_[base + c]) continue;
      const Increment& inc = cell[f][c];
      switch (inc.kind) {
        case Increment::Kind::Finite:
          sums_[base + c] += inc.value;
          live = true;
          break;
        case Increment::Kind::Eliminates:
          alive_[base + c] = 0;
          break;
        case Increment::Kind::Undefined:
          throw std::domain_error("information update: observation has zero probability under the model "
                                  "(posterior undefined for the scanned bit)");
      }
    }
    any_alive_[k] = live ? 1 : 0;
  }
  ++queries_;
}

void info_update_t1(InformationState& state, std::span<const std::uint8_t> scanned_bits, std::uint8_t response,
                    double edge_prior, const BinaryChannel& scan) {
  const IncrementTable table = increments_noiseless_query(edge_prior, scan);
  state.apply(scanned_bits, response, std::span(&table, 1));
}

void info_update_t2(InformationState& state, std::span<const std::uint8_t> scanned_bits, std::uint8_t response,
                    double community_prior, const BinaryChannel& scan) {
  info_update_t1(state, scanned_bits, response, community_prior, scan);
}

void info_update_t3(InformationState& state, std::span<const std::uint8_t> scanned_bits, std::uint8_t response,
                    double edge_prior, std::span<const BinaryChannel> scan_channels, const BinaryChannel& query) {
  std::vector<IncrementTable> tables;
  tables.reserve(scan_channels.size());
  for (const auto& scan : scan_channels) tables.push_back(increments_compound(edge_prior, scan, query));
  state.apply(scanned_bits, response, tables);
}

std::optional<UserId> identify(const InformationState& state, double epsilon, std::size_t min_queries) {
  if (state.queries() < min_queries) return std::nullopt;
  const double threshold = std::log(1.0 / epsilon);
  std::optional<UserId> found;
  for (UserId k = 0; k < state.num_users(); ++k) {
    const auto v = state.value(k);
    if (v && *v > threshold) {
      if (found) return std::nullopt;
      found = k;
    }
  }
  return found;
}

// ---------------------------------------------------------------------------

void AttackSetup::validate() const {
  if (!truth || !scanned || !noise || !victims) throw std::invalid_argument("attack: setup is incomplete");
  config.validate();
  const std::size_t m = truth->num_users();
  const std::size_t n = truth->num_groups();
  if (scanned->num_users() != m || scanned->num_groups() != n)
    throw std::invalid_argument("attack: scanned graph dimensions differ from the ground truth");
  if (victims->size() != m) throw std::invalid_argument("attack: victim distribution must cover every user");
  noise->validate(m);
  if (config.variant != ItsVariant::StochasticBlock && !(edge_prior > 0.0 && edge_prior < 1.0))
    throw std::invalid_argument("attack: edge prior must lie in (0, 1)");
  if (config.variant != ItsVariant::Compound && noise->gamma_channels.size() != 1)
    throw std::invalid_argument("attack: this variant assumes one scan channel shared by every user");
  if (config.variant == ItsVariant::StochasticBlock) {
    if (group_priors.size() != n) throw std::invalid_argument("attack: stochastic-block variant needs per-group priors");
    for (double p : group_priors) {
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("attack: community priors must lie in (0, 1)");
    }
  }
  if (config.order == QueryOrder::CommunityPopularityDesc && group_tau0.size() != n)
    throw std::invalid_argument("attack: community order needs per-group tau0");
}

AttackSetup make_attack_setup(const BipartiteGraph& truth, const BipartiteGraph& scanned, const NoiseModel& noise,
                              const VictimDistribution& victims, const ItsConfig& config,
                              const GenerationParams& params) {
  AttackSetup setup;
  setup.truth = &truth;
  setup.scanned = &scanned;
  setup.noise = &noise;
  setup.victims = &victims;
  setup.config = config;
  setup.edge_prior = edge_prior(params);
  setup.group_tau0 = params.tau0;
  if (config.variant == ItsVariant::StochasticBlock) setup.group_priors = community_edge_priors(params);
  return setup;
}

AttackOutcome run_attack(const AttackSetup& setup, UserId victim, Rng& rng) {
  setup.validate();
  const BipartiteGraph& truth = *setup.truth;
  const BipartiteGraph& scanned = *setup.scanned;
  const NoiseModel& noise = *setup.noise;
  const ItsConfig& config = setup.config;
  if (victim >= truth.num_users()) throw std::out_of_range("attack: victim index out of range");

  const std::size_t n = truth.num_groups();
  const std::size_t cap = std::min(config.max_queries.value_or(n), n);
  const QueryPlan plan(config, n, setup.group_tau0);
  const BinaryChannel& query_channel = noise.query_channel(victim);

  std::vector<IncrementTable> tables;
  std::map<double, IncrementTable> community_tables;
  switch (config.variant) {
    case ItsVariant::NoiselessQuery:
      tables.push_back(increments_noiseless_query(setup.edge_prior, noise.gamma_channels.front().channel));
      break;
    case ItsVariant::StochasticBlock:
      for (double p : setup.group_priors) {
        if (!community_tables.contains(p))
          community_tables.emplace(p, increments_noiseless_query(p, noise.gamma_channels.front().channel));
      }
      tables.resize(1);
      break;
    case ItsVariant::Compound:
      for (const auto& gamma : noise.gamma_channels)
        tables.push_back(increments_compound(setup.edge_prior, gamma.channel, query_channel));
      break;
  }

  InformationState state(*setup.victims, tables.size());
  AttackOutcome outcome;
  outcome.victim = victim;
  std::vector<std::uint8_t> column;
  for (std::size_t t = 0; t < cap; ++t) {
    const GroupId j = plan.next(t);
    const std::uint8_t truth_bit = truth.has_edge(victim, j) ? 1 : 0;
    const std::uint8_t y = channels::query_response(truth_bit, query_channel, rng);
    scanned.column(j, column);
    if (config.variant == ItsVariant::StochasticBlock) tables[0] = community_tables.at(setup.group_priors[j]);
    state.apply(column, y, tables);
    outcome.transcript.push_back({j, y});
    if (auto id = identify(state, config.epsilon, config.min_queries_floor)) {
      outcome.identified = *id;
      break;
    }
  }
  outcome.num_queries = outcome.transcript.size();
  outcome.correct = outcome.identified && *outcome.identified == victim;
  outcome.exhausted = !outcome.identified;
  return outcome;
}

}  // namespace deanon
