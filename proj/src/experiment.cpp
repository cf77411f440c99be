#include "deanon/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "deanon/attacker.hpp"
#include "deanon/channel.hpp"
#include "deanon/generator.hpp"
#include "deanon/snap.hpp"

namespace deanon {

namespace {

using stream_tag::kGen;
using stream_tag::kNoise;
using stream_tag::kScan;
using stream_tag::kTrial;

template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

std::optional<bounds::BoundReport> bound_with_prior(const ExperimentConfig& config, double prior, std::size_t m,
                                                    const GenerationParams* params) {
  const VictimDistribution victims = config.victim.build(m);
  switch (config.its.variant) {
    case ItsVariant::NoiselessQuery:
      return bounds::theorem1_bound(prior, config.noise.gamma.front().channel, victims, config.its.epsilon,
                                    config.c_prime);
    case ItsVariant::StochasticBlock:
      if (!params) return std::nullopt;
      return bounds::theorem2_bound(*params, config.noise.gamma.front().channel, victims, config.its.epsilon);
    case ItsVariant::Compound: {
      Rng rng = Rng::stream(config.seed, {kNoise, 0});
      const NoiseModel noise = config.noise.build(m, rng);
      return bounds::theorem3_bound(prior, noise, victims, config.its.epsilon, config.c_prime);
    }
  }
  return std::nullopt;
}

void attach_bound(ExperimentSummary& summary, std::optional<bounds::BoundReport> bound) {
  summary.bound = std::move(bound);
  if (summary.bound && std::isfinite(summary.bound->q_bar_bound) && summary.trials > summary.failed)
    summary.bound_respected = summary.mean_q <= summary.bound->q_bar_bound + 2.0 * summary.std_error_q;
}

}  // namespace

std::optional<bounds::BoundReport> bound_for(const ExperimentConfig& config) {
  if (config.snap) return std::nullopt;
  try {
    return bound_with_prior(config, edge_prior(config.generation), config.generation.m, &config.generation);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  ExperimentSummary s;
  s.experiment = config.experiment;
  s.series = config.series.empty() ? config.experiment : config.series;
  s.variant = to_string(config.its.variant);
  s.seed = config.seed;
  s.epsilon = config.its.epsilon;
  s.alpha = config.generation.alpha;
  s.mu = config.generation.mu;
  s.m = config.generation.m;
  s.n = config.generation.n;
  if (!records.empty()) {
    s.m = records.front().m;
    s.n = records.front().n;
  }
  s.trials = records.size();

  double sum = 0.0;
  std::size_t ran = 0, correct = 0, wrong = 0, exhausted = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) {
      ++s.failed;
      continue;
    }
    ++ran;
    sum += static_cast<double>(r.q);
    correct += r.correct ? 1 : 0;
    wrong += (r.identified && !r.correct) ? 1 : 0;
    exhausted += r.exhausted ? 1 : 0;
  }
  if (ran > 0) {
    s.mean_q = sum / static_cast<double>(ran);
    if (ran > 1) {
      double ss = 0.0;
      for (const auto& r : records) {
        if (!r.error.empty()) continue;
        const double d = static_cast<double>(r.q) - s.mean_q;
        ss += d * d;
      }
      s.std_error_q = std::sqrt(ss / static_cast<double>(ran - 1) / static_cast<double>(ran));
    }
  }
  const double total = static_cast<double>(std::max<std::size_t>(1, s.trials));
  s.success_rate = static_cast<double>(correct) / total;
  s.error_rate = 1.0 - s.success_rate;
  s.misidentification_rate = static_cast<double>(wrong) / total;
  s.exhausted_rate = static_cast<double>(exhausted) / total;
  s.adjusted_q = s.m > 1 ? s.mean_q - std::log(1.0 / s.epsilon) / std::log(static_cast<double>(s.m)) : s.mean_q;
  s.x = static_cast<double>(s.m);
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  ExperimentResult result;
  result.config = config;

  std::optional<SnapGraph> snap;
  GenerationParams params = config.generation;
  if (config.snap) {
    snap = read_snap_communities(config.snap->path, config.snap->min_group_size, config.snap->min_user_memberships);
    result.snap_manifest = to_json(snap->manifest);
    params.m = snap->graph.num_users();
    params.n = snap->graph.num_groups();
    params.alpha = 0.0;
  }
  const std::size_t m = params.m;
  const std::size_t n = params.n;
  const VictimDistribution victims = config.victim.build(m);
  const std::string variant = to_string(config.its.variant);

  result.records.resize(config.replicates * config.trials);
  result.skipped_steps.assign(config.replicates, 0);
  for (std::size_t r = 0; r < config.replicates; ++r) {
    ResultRecord base;
    base.experiment = config.experiment;
    base.seed = config.seed;
    base.replicate = r;
    base.m = m;
    base.n = n;
    base.alpha = params.alpha;
    base.variant = variant;

    std::optional<GroundTruth> generated;
    std::optional<NoiseModel> noise;
    std::optional<BipartiteGraph> scanned;
    AttackSetup setup;
    std::string replicate_error;
    try {
      const BipartiteGraph* truth = nullptr;
      if (snap) {
        truth = &snap->graph;
      } else {
        Rng gen_rng = Rng::stream(config.seed, {kGen, r});
        generated = generate_ground_truth(params, gen_rng);
        result.skipped_steps[r] = generated->skipped_steps.size();
        truth = &generated->graph;
      }
      Rng noise_rng = Rng::stream(config.seed, {kNoise, r});
      noise = config.noise.build(m, noise_rng);
      Rng scan_rng = Rng::stream(config.seed, {kScan, r});
      scanned = channels::scan_graph(*truth, *noise, scan_rng);
      if (snap) {
        setup.truth = truth;
        setup.scanned = &*scanned;
        setup.noise = &*noise;
        setup.victims = &victims;
        setup.config = config.its;
        setup.edge_prior = static_cast<double>(truth->num_edges()) / (static_cast<double>(m) * static_cast<double>(n));
        setup.group_tau0.resize(n);
        setup.group_priors.resize(n);
        for (GroupId j = 0; j < n; ++j) {
          setup.group_tau0[j] = static_cast<double>(truth->group_size(j));
          setup.group_priors[j] = static_cast<double>(truth->group_size(j)) / static_cast<double>(m);
        }
      } else {
        setup = make_attack_setup(*truth, *scanned, *noise, victims, config.its, params);
      }
      setup.validate();
    } catch (const std::exception& e) {
      replicate_error = e.what();
    }

    parallel_for(config.trials, jobs, [&](std::size_t t) {
      ResultRecord rec = base;
      rec.trial = t;
      if (!replicate_error.empty()) {
        rec.error = replicate_error;
      } else {
        const auto start = std::chrono::steady_clock::now();
        try {
          Rng rng = Rng::stream(config.seed, {kTrial, r, t});
          rec.victim = victims.sample(rng);
          const AttackOutcome outcome = run_attack(setup, rec.victim, rng);
          rec.q = outcome.num_queries;
          rec.correct = outcome.correct;
          rec.exhausted = outcome.exhausted;
          rec.identified = outcome.identified;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
        if (config.record_timing) {
          rec.elapsed_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
      }
      result.records[r * config.trials + t] = std::move(rec);
    });
  }

  result.summary = summarize(config, result.records);
  for (auto s : result.skipped_steps) result.summary.skipped_steps += s;
  std::optional<bounds::BoundReport> bound;
  try {
    if (snap) {
      const double prior =
          static_cast<double>(snap->graph.num_edges()) / (static_cast<double>(m) * static_cast<double>(n));
      bound = bound_with_prior(config, prior, m, nullptr);
    } else {
      bound = bound_for(config);
    }
  } catch (const std::exception&) {
    bound.reset();
  }
  attach_bound(result.summary, std::move(bound));
  return result;
}

// Sweeps --------------------------------------------------------------------

std::string to_string(SweepMetric metric) {
  switch (metric) {
    case SweepMetric::AdjustedQ: return "adjusted_q";
    case SweepMetric::MeanQ: return "mean_q";
    case SweepMetric::SuccessRate: return "success_rate";
  }
  return "unknown";
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

ExperimentConfig base_config(const std::string& name, const SweepOptions& options, std::size_t m, double beta,
                             double alpha, double epsilon) {
  ExperimentConfig c;
  c.experiment = name;
  const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(m) / beta));
  c.generation = GenerationParams::alpha_pa(n, m, 100, alpha);
  c.trials = options.trials;
  c.replicates = options.replicates;
  c.seed = options.seed;
  c.its = ItsConfig::make(ItsVariant::NoiselessQuery, epsilon);
  return c;
}

LabeledChannel mixed(const std::string& label, double weight_good) {
  return {label, channels::mixture(weight_good, channels::bsc(0.01), channels::bsc(0.3))};
}

}  // namespace

Sweep fig2_sweep(const SweepOptions& options, const std::vector<double>& alphas) {
  Sweep sweep;
  sweep.name = "fig2";
  sweep.metrics = {SweepMetric::AdjustedQ};
  sweep.reference_two_m_over_mu = true;
  for (double alpha : alphas) {
    for (std::size_t m : options.m_values) {
      ExperimentConfig c = base_config("fig2", options, m, 0.1, alpha, 0.01);
      c.series = "alpha=" + format_number(alpha);
      sweep.configs.push_back(std::move(c));
    }
  }
  return sweep;
}

Sweep fig3_sweep(const SweepOptions& options, const std::vector<std::size_t>& levels) {
  Sweep sweep;
  sweep.name = "fig3";
  sweep.metrics = {SweepMetric::MeanQ};
  for (std::size_t level : levels) {
    if (level == 0 || level > 20) throw std::invalid_argument("fig3: diversity level must lie in [1, 20]");
    const std::size_t top = (std::size_t{1} << level) - 1;
    NoiseSpec noise;
    noise.gamma = {{"noiseless", channels::identity()}};
    for (std::size_t theta = 0; theta <= top; ++theta)
      noise.theta.push_back(mixed("theta" + std::to_string(theta), static_cast<double>(theta) / static_cast<double>(top)));
    for (std::size_t m : options.m_values) {
      ExperimentConfig c = base_config("fig3", options, m, 0.4, 1.0, 0.1);
      c.series = "k=" + std::to_string(level);
      c.noise = noise;
      c.its = ItsConfig::make(ItsVariant::Compound, 0.1);
      sweep.configs.push_back(std::move(c));
    }
  }
  return sweep;
}

Sweep fig4_sweep(const SweepOptions& options, const std::vector<std::size_t>& sizes) {
  Sweep sweep;
  sweep.name = "fig4";
  sweep.metrics = {SweepMetric::SuccessRate};
  for (std::size_t k : sizes) {
    if (k < 2) throw std::invalid_argument("fig4: need at least two scan channels");
    NoiseSpec noise;
    noise.theta = {{"noiseless", channels::identity()}};
    for (std::size_t gamma = 1; gamma <= k; ++gamma)
      noise.gamma.push_back(
          mixed("gamma" + std::to_string(gamma), static_cast<double>(gamma - 1) / static_cast<double>(k - 1)));
    for (std::size_t m : options.m_values) {
      ExperimentConfig c = base_config("fig4", options, m, 0.4, 1.0, 0.1);
      c.series = "|Gamma|=" + std::to_string(k);
      c.noise = noise;
      c.its = ItsConfig::make(ItsVariant::Compound, 0.1);
      sweep.configs.push_back(std::move(c));
    }
  }
  return sweep;
}

Sweep fig5_sweep(const std::string& snap_path, std::size_t trials, std::uint64_t seed,
                 const std::vector<double>& omissions) {
  Sweep sweep;
  sweep.name = "fig5";
  sweep.metrics = {SweepMetric::SuccessRate, SweepMetric::MeanQ};
  sweep.x_label = "omission probability";
  for (double e : omissions) {
    ExperimentConfig c;
    c.experiment = "fig5";
    c.series = "livejournal";
    c.snap = SnapSource{snap_path, 400, 4};
    c.generation.alpha = 0.0;
    c.noise.gamma = {{"omission", channels::omission(e)}};
    c.noise.theta = {{"omission", channels::omission(e)}};
    c.its = ItsConfig::make(ItsVariant::Compound, 0.1);
    c.trials = trials;
    c.replicates = 1;
    c.seed = seed;
    sweep.configs.push_back(std::move(c));
    sweep.x_values.push_back(e);
  }
  return sweep;
}

Sweep sweep_by_name(const std::string& name, const SweepOptions& options, const std::string& snap_path) {
  if (name == "fig2") return fig2_sweep(options);
  if (name == "fig3") return fig3_sweep(options);
  if (name == "fig4") return fig4_sweep(options);
  if (name == "fig5") {
    if (snap_path.empty()) throw std::invalid_argument("fig5 needs a community file (--snap PATH)");
    return fig5_sweep(snap_path, options.trials, options.seed);
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected fig2, fig3, fig4 or fig5)");
}

std::vector<ExperimentResult> run_sweep(const Sweep& sweep, std::size_t jobs) {
  if (!sweep.x_values.empty() && sweep.x_values.size() != sweep.configs.size())
    throw std::invalid_argument("sweep: one x value per config required");
  std::vector<ExperimentResult> results;
  results.reserve(sweep.configs.size());
  for (std::size_t i = 0; i < sweep.configs.size(); ++i) {
    results.push_back(run_experiment(sweep.configs[i], jobs));
    if (!sweep.x_values.empty()) results.back().summary.x = sweep.x_values[i];
  }
  return results;
}

}  // namespace deanon
