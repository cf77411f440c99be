// Command line front end: generate, attack, experiment, verify-props, bounds, ingest.

#include <cmath>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deanon/attacker.hpp"
#include "deanon/bounds.hpp"
#include "deanon/channel.hpp"
#include "deanon/config.hpp"
#include "deanon/emit.hpp"
#include "deanon/experiment.hpp"
#include "deanon/generator.hpp"
#include "deanon/propositions.hpp"
#include "deanon/snap.hpp"

using nlohmann::json;
using namespace deanon;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::size_t jobs = 1;
};

struct GenFlags {
  std::optional<std::size_t> n;
  std::size_t m = 1000;
  std::size_t mu = 100;
  std::optional<double> beta;
  double alpha = 1.0;
  std::string model = "alpha_pa";
  std::vector<double> tau0;

  void add(CLI::App* app) {
    app->add_option("--n", n, "number of groups");
    app->add_option("--m", m, "number of users")->capture_default_str();
    app->add_option("--mu", mu, "mean group size")->capture_default_str();
    app->add_option("--beta", beta, "m / n, used when --n is absent");
    app->add_option("--alpha", alpha, "growth exponent in (0, 1]")->capture_default_str();
    app->add_option("--model", model, "alpha_pa, sb or iee")->capture_default_str();
    app->add_option("--tau0", tau0, "per-group initial popularity (sb)");
  }

  GenerationParams params() const {
    const ModelKind kind = model_kind_from_string(model);
    std::size_t groups = n.value_or(0);
    if (!n && !tau0.empty()) groups = tau0.size();
    if (!n && tau0.empty()) {
      if (!beta) throw std::invalid_argument("give --n or --beta");
      groups = static_cast<std::size_t>(std::llround(static_cast<double>(m) / *beta));
    }
    switch (kind) {
      case ModelKind::AlphaPA: return GenerationParams::alpha_pa(groups, m, mu, alpha);
      case ModelKind::IEE: return GenerationParams::iee(groups, m, mu);
      case ModelKind::StochasticBlock:
        return GenerationParams::stochastic_block(m, mu, tau0.empty() ? std::vector<double>(groups, 1.0) : tau0);
    }
    return {};
  }
};

ExperimentConfig config_or_flags(const Globals& g, const GenFlags& flags) {
  ExperimentConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config);
  } else {
    c.generation = flags.params();
  }
  if (g.seed) c.seed = *g.seed;
  return c;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

BinaryChannel scan_from_flags(std::optional<double> bsc, std::optional<double> omission) {
  if (bsc && omission) throw std::invalid_argument("give at most one of --scan-bsc and --scan-omission");
  if (bsc) return channels::bsc(*bsc);
  if (omission) return channels::omission(*omission);
  return channels::identity();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active deanonymization simulator for bipartite membership networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON experiment config");
  app.add_option("--seed", g.seed, "64-bit seed (overrides the config)");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "grow one ground-truth graph and write it in community format");
  GenFlags gen_flags;
  gen_flags.add(gen);

  // attack
  auto* attack = app.add_subcommand("attack", "run one attack on a freshly generated graph");
  GenFlags attack_flags;
  attack_flags.add(attack);
  std::optional<std::uint32_t> victim;
  std::string attack_variant = "T1_NOISELESS_QUERY";
  double attack_eps = 0.01;
  bool show_transcript = false;
  attack->add_option("--victim", victim, "victim index (default: drawn from the victim distribution)");
  attack->add_option("--variant", attack_variant, "ITS variant when no config is given")->capture_default_str();
  attack->add_option("--epsilon", attack_eps, "ITS error parameter when no config is given")->capture_default_str();
  attack->add_flag("--transcript", show_transcript, "print the query transcript");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiment from a config or a preset sweep");
  std::string preset;
  std::vector<std::size_t> m_values;
  std::optional<std::size_t> trials, replicates;
  std::string snap_path;
  std::vector<std::string> formats;
  exp->add_option("--preset", preset, "fig2, fig3, fig4 or fig5");
  exp->add_option("--m-values", m_values, "m values for a preset sweep");
  exp->add_option("--trials", trials, "trials per replicate");
  exp->add_option("--replicates", replicates, "ground-truth replicates");
  exp->add_option("--snap", snap_path, "community file for fig5");
  exp->add_option("--formats", formats, "subset of csv svg json");

  // verify-props
  auto* props = app.add_subcommand("verify-props", "Monte Carlo check of the structural graph properties");
  GenFlags prop_flags;
  prop_flags.mu = 3;
  prop_flags.m = 200;
  prop_flags.beta = 1.0;
  prop_flags.add(props);
  props::PropositionOptions prop_opts;
  props->add_option("--samples", prop_opts.samples, "graphs to sample")->capture_default_str();
  props->add_option("--bootstrap", prop_opts.bootstrap, "bootstrap resamples")->capture_default_str();
  props->add_option("--psi", prop_opts.psi_grid, "tail grid points");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "closed-form expected-query and error bounds");
  GenFlags bound_flags;
  bound_flags.add(bnd);
  int theorem = 0;
  double bound_eps = 0.01;
  double c_prime = 1.0;
  std::optional<double> scan_bsc, scan_omission;
  bnd->add_option("--theorem", theorem, "1, 2 or 3 (default: from the config variant)");
  bnd->add_option("--epsilon", bound_eps, "ITS error parameter when no config is given")->capture_default_str();
  bnd->add_option("--c-prime", c_prime, "memoryless constant in (0, 1]")->capture_default_str();
  bnd->add_option("--scan-bsc", scan_bsc, "scan channel BSC(p) when no config is given");
  bnd->add_option("--scan-omission", scan_omission, "scan channel omission(s) when no config is given");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse and filter a SNAP community file");
  std::string ingest_path;
  std::size_t min_group = 0, min_user = 0;
  ingest->add_option("path", ingest_path, "community file")->required();
  ingest->add_option("--min-group-size", min_group, "keep groups with at least this many members")
      ->capture_default_str();
  ingest->add_option("--min-user-memberships", min_user, "keep users in at least this many surviving groups")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ExperimentConfig c = config_or_flags(g, gen_flags);
      Rng rng = Rng::stream(c.seed, {stream_tag::kGen, 0});
      const GroundTruth gt = generate_ground_truth(c.generation, rng);
      std::filesystem::create_directories(g.out);
      const std::string path = (std::filesystem::path(g.out) / "graph.txt").string();
      write_snap_communities(path, gt.graph);
      print({{"path", path},
             {"seed", c.seed},
             {"rng", kRngAlgorithm},
             {"n", c.generation.n},
             {"m", c.generation.m},
             {"mu", c.generation.mu},
             {"alpha", c.generation.alpha},
             {"model", to_string(c.generation.model)},
             {"edges", gt.graph.num_edges()},
             {"skipped_steps", gt.skipped_steps.size()}});
      return 0;
    }

    if (*attack) {
      ExperimentConfig c = config_or_flags(g, attack_flags);
      if (g.config.empty()) c.its = ItsConfig::make(its_variant_from_string(attack_variant), attack_eps);
      c.validate();
      Rng gen_rng = Rng::stream(c.seed, {stream_tag::kGen, 0});
      const GroundTruth gt = generate_ground_truth(c.generation, gen_rng);
      Rng noise_rng = Rng::stream(c.seed, {stream_tag::kNoise, 0});
      const NoiseModel noise = c.noise.build(c.generation.m, noise_rng);
      Rng scan_rng = Rng::stream(c.seed, {stream_tag::kScan, 0});
      const BipartiteGraph scanned = channels::scan_graph(gt.graph, noise, scan_rng);
      const VictimDistribution victims = c.victim.build(c.generation.m);
      const AttackSetup setup = make_attack_setup(gt.graph, scanned, noise, victims, c.its, c.generation);
      Rng rng = Rng::stream(c.seed, {stream_tag::kTrial, 0, 0});
      const UserId v = victim ? *victim : victims.sample(rng);
      const AttackOutcome outcome = run_attack(setup, v, rng);
      json j{{"seed", c.seed},
             {"variant", to_string(c.its.variant)},
             {"victim", outcome.victim},
             {"identified", outcome.identified ? json(*outcome.identified) : json(nullptr)},
             {"queries", outcome.num_queries},
             {"correct", outcome.correct},
             {"exhausted", outcome.exhausted}};
      if (show_transcript) {
        json t = json::array();
        for (const auto& q : outcome.transcript) t.push_back({q.group, q.response});
        j["transcript"] = t;
      }
      print(j);
      return 0;
    }

    if (*exp) {
      if (!preset.empty()) {
        SweepOptions opts;
        if (!m_values.empty()) opts.m_values = m_values;
        if (trials) opts.trials = *trials;
        if (replicates) opts.replicates = *replicates;
        if (g.seed) opts.seed = *g.seed;
        const Sweep sweep = sweep_by_name(preset, opts, snap_path);
        const auto results = run_sweep(sweep, g.jobs);
        const auto files = emit_sweep(sweep, results, g.out, formats.empty() ? std::vector<std::string>{"csv", "svg", "json"} : formats);
        json rows = json::array();
        for (const auto& r : results) rows.push_back(to_json(r.summary));
        print({{"preset", preset}, {"summaries", rows}, {"files", files}});
        return 0;
      }
      if (g.config.empty()) throw std::invalid_argument("experiment needs --config or --preset");
      ExperimentConfig c = load_config(g.config);
      if (g.seed) c.seed = *g.seed;
      if (trials) c.trials = *trials;
      if (replicates) c.replicates = *replicates;
      const ExperimentResult result = run_experiment(c, g.jobs);
      const std::string dir = app.get_option("--out")->count() ? g.out : c.output_dir;
      const auto files = emit_results(result, dir, formats.empty() ? c.formats : formats);
      print({{"summary", to_json(result.summary)}, {"files", files}});
      return 0;
    }

    if (*props) {
      GenerationParams params;
      if (!g.config.empty()) {
        params = load_config(g.config).generation;
      } else {
        params = prop_flags.params();
      }
      if (g.seed) prop_opts.seed = *g.seed;
      const props::PropositionReport r = props::verify_propositions(params, prop_opts);
      auto est = [](const props::Estimate& e) { return json{{"mean", e.mean}, {"std_error", e.std_error}}; };
      json tail = json::array();
      for (const auto& c : r.tail) {
        tail.push_back({{"psi", c.psi},
                        {"threshold", c.threshold},
                        {"empirical", c.empirical},
                        {"std_error", c.std_error},
                        {"bound", c.bound},
                        {"fraction_below", c.fraction_below},
                        {"conclusive", c.conclusive},
                        {"passed", c.passed}});
      }
      json fact = json::array();
      for (const auto& c : r.factorization) {
        fact.push_back({{"length", c.length},
                        {"pattern", c.pattern},
                        {"ratio", c.ratio},
                        {"lower", c.lower},
                        {"upper", c.upper},
                        {"interval", {c.interval_low, c.interval_high}},
                        {"fraction_inside", c.fraction_inside},
                        {"expected_count", c.expected_count},
                        {"check", c.check == props::EnvelopeCheck::Coverage ? "coverage" : "consistency"},
                        {"conclusive", c.conclusive},
                        {"passed", c.passed}});
      }
      print({{"seed", prop_opts.seed},
             {"samples", r.samples},
             {"n", params.n},
             {"m", params.m},
             {"mu", params.mu},
             {"alpha", params.alpha},
             {"model", to_string(params.model)},
             {"moments",
              {{"mean_size", est(r.moments.mean_size)},
               {"mean_square", est(r.moments.mean_square)},
               {"mean_cross", est(r.moments.mean_cross)},
               {"skipped_steps", r.moments.skipped_steps}}},
             {"tail", tail},
             {"envelope", r.envelope},
             {"factorization", fact},
             {"inconclusive_cells", r.inconclusive_cells()},
             {"consistent", r.consistent()}});
      return r.consistent() ? 0 : 3;
    }

    if (*bnd) {
      ExperimentConfig c = config_or_flags(g, bound_flags);
      if (g.config.empty()) {
        c.its.epsilon = bound_eps;
        c.c_prime = c_prime;
        c.noise.gamma = {{"scan", scan_from_flags(scan_bsc, scan_omission)}};
      }
      const VictimDistribution victims = c.victim.build(c.generation.m);
      const int which = theorem != 0 ? theorem
                        : c.its.variant == ItsVariant::StochasticBlock ? 2
                        : c.its.variant == ItsVariant::Compound       ? 3
                                                                      : 1;
      bounds::BoundReport report;
      switch (which) {
        case 1:
          report = bounds::theorem1_bound(c.generation, c.noise.gamma.front().channel, victims, c.its.epsilon, c.c_prime);
          break;
        case 2:
          report = bounds::theorem2_bound(c.generation, c.noise.gamma.front().channel, victims, c.its.epsilon);
          break;
        case 3: {
          Rng rng = Rng::stream(c.seed, {stream_tag::kNoise, 0});
          const NoiseModel noise = c.noise.build(c.generation.m, rng);
          report = bounds::theorem3_bound(c.generation, noise, victims, c.its.epsilon, c.c_prime);
          break;
        }
        default: throw std::invalid_argument("--theorem must be 1, 2 or 3");
      }
      print(to_json(report));
      return 0;
    }

    if (*ingest) {
      const SnapGraph sg = read_snap_communities(ingest_path, min_group, min_user);
      std::filesystem::create_directories(g.out);
      const auto base = std::filesystem::path(g.out);
      write_snap_communities((base / "communities.txt").string(), sg.graph, sg.user_ids);
      const json manifest = to_json(sg.manifest);
      std::ofstream((base / "ingest_manifest.json").string(), std::ios::binary) << manifest.dump(2) << "\n";
      print(manifest);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
