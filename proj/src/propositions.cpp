#include "deanon/propositions.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "deanon/bounds.hpp"
#include "deanon/generator.hpp"

namespace deanon::props {

namespace {

constexpr std::uint64_t kPropStream = 0x70726f70;  // graph sampling
constexpr std::uint64_t kBootStream = 0x626f6f74;  // bootstrap resampling

Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  const double n = static_cast<double>(xs.size());
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

std::string pattern_string(std::size_t mask, std::size_t length) {
  std::string s(length, '0');
  for (std::size_t pos = 0; pos < length; ++pos) {
    if (mask >> pos & 1U) s[pos] = '1';
  }
  return s;
}

// Marginal P(R_{i,j} = 1) for each group under the model, ignoring skips.
std::vector<double> edge_marginals(const GenerationParams& params) {
  if (params.model == ModelKind::AlphaPA) return std::vector<double>(params.n, edge_prior(params));
  return community_edge_priors(params);
}

struct PatternCounts {
  std::size_t length;
  std::size_t blocks;
  // counts[graph][mask]
  std::vector<std::vector<double>> counts;
};

void count_patterns(const BipartiteGraph& g, PatternCounts& pc) {
  const std::size_t patterns = std::size_t{1} << pc.length;
  std::vector<double> counts(patterns, 0.0);
  const std::size_t limit = pc.blocks * pc.length;
  for (UserId k = 0; k < g.num_users(); ++k) {
    std::size_t touched = 0;
    std::size_t current_block = SIZE_MAX;
    std::size_t mask = 0;
    for (GroupId j : g.groups_of(k)) {
      if (j >= limit) break;
      const std::size_t block = j / pc.length;
      if (block != current_block) {
        if (current_block != SIZE_MAX) counts[mask] += 1.0;
        current_block = block;
        mask = 0;
        ++touched;
      }
      mask |= std::size_t{1} << (j % pc.length);
    }
    if (current_block != SIZE_MAX) counts[mask] += 1.0;
    counts[0] += static_cast<double>(pc.blocks - touched);
  }
  pc.counts.push_back(std::move(counts));
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

bool PropositionReport::consistent() const {
  for (const auto& c : tail) {
    if (c.conclusive && !c.passed) return false;
  }
  for (const auto& c : factorization) {
    if (c.conclusive && !c.passed) return false;
  }
  return true;
}

std::size_t PropositionReport::inconclusive_cells() const {
  std::size_t count = 0;
  for (const auto& c : tail) count += c.conclusive ? 0 : 1;
  for (const auto& c : factorization) count += c.conclusive ? 0 : 1;
  return count;
}

PropositionReport verify_propositions(const GenerationParams& params, const PropositionOptions& options) {
  params.validate();
  if (options.samples < 2) throw std::invalid_argument("verify_propositions: need at least two samples");
  if (options.bootstrap == 0) throw std::invalid_argument("verify_propositions: need at least one bootstrap resample");

  const std::size_t n = params.n;
  const std::size_t m = params.m;
  const double delta = static_cast<double>(params.delta());

  PropositionReport report;
  report.params = params;
  report.samples = options.samples;
  report.envelope = params.model == ModelKind::AlphaPA ? "sandwich" : "sb";

  std::vector<bounds::TailBound> tail_bounds;
  std::vector<double> psis;
  const double psi_max = static_cast<double>(m) / static_cast<double>(params.mu) - 1.0;
  for (double psi : options.psi_grid) {
    if (psi > 0.0 && psi <= psi_max) {
      psis.push_back(psi);
      tail_bounds.push_back(bounds::prop2_tail_bound(params, psi));
    }
  }

  std::vector<PatternCounts> patterns;
  for (std::size_t len : options.pattern_lengths) {
    if (len == 0 || len > 16 || len > n) continue;
    patterns.push_back({len, n / len, {}});
  }

  std::vector<double> mean_size, mean_square, mean_cross;
  std::vector<std::vector<double>> tail_counts(psis.size());
  std::size_t skips = 0;

  for (std::size_t s = 0; s < options.samples; ++s) {
    Rng rng = Rng::stream(options.seed, {kPropStream, s});
    const GroundTruth gt = generate_ground_truth(params, rng);
    const BipartiteGraph& g = gt.graph;
    skips += gt.skipped_steps.size();

    double sum = 0.0, sum_sq = 0.0;
    for (GroupId j = 0; j < n; ++j) {
      const auto d = static_cast<double>(g.group_size(j));
      sum += d;
      sum_sq += d * d;
    }
    mean_size.push_back(sum / static_cast<double>(n));
    mean_square.push_back(sum_sq / static_cast<double>(n));
    mean_cross.push_back(n > 1 ? (sum * sum - sum_sq) / (static_cast<double>(n) * static_cast<double>(n - 1)) : 0.0);

    for (std::size_t i = 0; i < psis.size(); ++i) {
      const auto l = static_cast<std::size_t>(std::ceil(tail_bounds[i].threshold - 1e-9));
      double hits = 0.0;
      for (UserId k = 0; k < m; ++k) hits += g.groups_of(k).size() >= l ? 1.0 : 0.0;
      tail_counts[i].push_back(hits);
    }
    for (auto& pc : patterns) count_patterns(g, pc);
  }

  report.moments = {estimate(mean_size), estimate(mean_square), estimate(mean_cross), skips};

  // Bootstrap index sets shared by every cell.
  Rng boot = Rng::stream(options.seed, {kBootStream});
  std::vector<std::vector<std::uint32_t>> resamples(options.bootstrap, std::vector<std::uint32_t>(options.samples));
  for (auto& r : resamples) {
    for (auto& idx : r) idx = static_cast<std::uint32_t>(boot.below(options.samples));
  }

  const double per_graph_users = static_cast<double>(m);
  for (std::size_t i = 0; i < psis.size(); ++i) {
    TailCell cell;
    cell.psi = psis[i];
    cell.threshold = tail_bounds[i].threshold;
    cell.bound = tail_bounds[i].bound;
    cell.exponent_bits = tail_bounds[i].exponent_bits;
    std::vector<double> freq(options.samples);
    for (std::size_t s = 0; s < options.samples; ++s) freq[s] = tail_counts[i][s] / per_graph_users;
    const Estimate e = estimate(freq);
    cell.empirical = e.mean;
    cell.std_error = e.std_error;
    std::size_t below = 0;
    for (const auto& r : resamples) {
      double acc = 0.0;
      for (auto idx : r) acc += freq[idx];
      below += acc / static_cast<double>(options.samples) <= cell.bound ? 1 : 0;
    }
    cell.fraction_below = static_cast<double>(below) / static_cast<double>(options.bootstrap);
    cell.conclusive = cell.bound * per_graph_users * static_cast<double>(options.samples) >= options.min_expected_count;
    cell.passed = cell.fraction_below >= options.coverage;
    report.tail.push_back(cell);
  }

  const std::vector<double> marginals = edge_marginals(params);
  for (const auto& pc : patterns) {
    const std::size_t npat = std::size_t{1} << pc.length;
    const double trials_per_graph = static_cast<double>(pc.blocks) * static_cast<double>(m);
    for (std::size_t mask = 0; mask < npat; ++mask) {
      FactorizationCell cell;
      cell.length = pc.length;
      cell.pattern = pattern_string(mask, pc.length);
      cell.weight = static_cast<std::size_t>(std::popcount(mask));

      double product = 0.0;
      for (std::size_t b = 0; b < pc.blocks; ++b) {
        double p = 1.0;
        for (std::size_t pos = 0; pos < pc.length; ++pos) {
          const double q = marginals[b * pc.length + pos];
          p *= (mask >> pos & 1U) ? q : 1.0 - q;
        }
        product += p;
      }
      cell.product = product / static_cast<double>(pc.blocks);

      auto ratio_of = [&](const std::vector<std::uint32_t>* idx) {
        double hits = 0.0;
        if (idx) {
          for (auto s : *idx) hits += pc.counts[s][mask];
        } else {
          for (const auto& c : pc.counts) hits += c[mask];
        }
        return hits / (trials_per_graph * static_cast<double>(options.samples)) / cell.product;
      };
      cell.ratio = ratio_of(nullptr);
      cell.observed = cell.ratio * cell.product;
      cell.expected_count = cell.product * trials_per_graph * static_cast<double>(options.samples);

      const double w = static_cast<double>(cell.weight);
      if (params.model == ModelKind::AlphaPA) {
        cell.check = EnvelopeCheck::Coverage;
        cell.lower = 1.0 - static_cast<double>(pc.length) * static_cast<double>(params.mu) / static_cast<double>(m);
        cell.upper = std::exp(static_cast<double>(params.mu) / params.beta());
      } else {
        cell.check = EnvelopeCheck::Consistency;
        cell.lower = std::pow(1.0 + w / delta, -w);
        cell.upper = std::pow(std::max(1.0 - w / delta, 1e-300), -w);
      }

      std::vector<double> ratios;
      ratios.reserve(options.bootstrap);
      std::size_t inside = 0;
      for (const auto& r : resamples) {
        const double x = ratio_of(&r);
        ratios.push_back(x);
        inside += (x >= cell.lower && x <= cell.upper) ? 1 : 0;
      }
      const double tail_mass = (1.0 - options.coverage) / 2.0;
      cell.interval_low = quantile(ratios, tail_mass);
      cell.interval_high = quantile(ratios, 1.0 - tail_mass);
      cell.fraction_inside = static_cast<double>(inside) / static_cast<double>(options.bootstrap);
      cell.conclusive = cell.expected_count >= options.min_expected_count;
      if (cell.check == EnvelopeCheck::Coverage) {
        cell.passed = cell.fraction_inside >= options.coverage;
      } else {
        cell.passed = cell.interval_high >= cell.lower && cell.interval_low <= cell.upper;
      }
      report.factorization.push_back(cell);
    }
  }
  return report;
}

}  // namespace deanon::props
