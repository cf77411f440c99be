#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deanon/bounds.hpp"
#include "deanon/config.hpp"
#include "deanon/core.hpp"

namespace deanon {

/// Substream tags: replicate r uses {kGen, r}, {kNoise, r}, {kScan, r}; trial t
/// of replicate r uses {kTrial, r, t}.
namespace stream_tag {
inline constexpr std::uint64_t kGen = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kScan = 3;
inline constexpr std::uint64_t kTrial = 4;
}  // namespace stream_tag

/// One attack trial.
struct ResultRecord {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
  std::size_t trial = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double alpha = 0.0;
  std::string variant;
  std::size_t q = 0;
  bool correct = false;
  bool exhausted = false;
  double elapsed_ms = 0.0;
  UserId victim = 0;
  std::optional<UserId> identified;
  /// Non-empty when the trial could not run; such trials count as failures.
  std::string error;
};

struct ExperimentSummary {
  std::string experiment;
  std::string series;
  std::string variant;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::size_t mu = 0;
  std::size_t trials = 0;   // records summarized
  std::size_t failed = 0;   // records with an error
  double mean_q = 0.0;
  double std_error_q = 0.0;
  /// mean_q - ln(1/eps) / ln m.
  double adjusted_q = 0.0;
  double success_rate = 0.0;
  /// 1 - success_rate: misidentified, exhausted and failed trials all count.
  double error_rate = 0.0;
  double misidentification_rate = 0.0;
  double exhausted_rate = 0.0;
  std::size_t skipped_steps = 0;
  /// Plot abscissa; m unless the sweep says otherwise.
  double x = 0.0;
  std::optional<bounds::BoundReport> bound;
  /// mean_q <= q_bar_bound + 2 standard errors; unset without a finite bound.
  std::optional<bool> bound_respected;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRecord> records;
  ExperimentSummary summary;
  /// Per-replicate count of skipped growth steps.
  std::vector<std::size_t> skipped_steps;
  /// Graph dimensions after ingestion when the config names a SNAP source.
  std::optional<nlohmann::json> snap_manifest;
};

/// Generates, scans and attacks per the config. Trials of one replicate run on
/// `jobs` worker threads; records come back in (replicate, trial) order and are
/// identical for any `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

/// Summary statistics recomputed from records alone (bound and skips are attached by the caller).
ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<ResultRecord>& records);

/// Closed-form bound matching the config's variant, if one applies.
std::optional<bounds::BoundReport> bound_for(const ExperimentConfig& config);

// Sweeps --------------------------------------------------------------------

/// What a sweep plots on its y axis.
enum class SweepMetric { AdjustedQ, MeanQ, SuccessRate };

std::string to_string(SweepMetric metric);

struct Sweep {
  std::string name;
  std::vector<ExperimentConfig> configs;
  /// One plot per metric.
  std::vector<SweepMetric> metrics{SweepMetric::MeanQ};
  /// Draw y = 2m/mu as a reference series.
  bool reference_two_m_over_mu = false;
  std::string x_label = "m";
  /// Per-config abscissa; empty means m.
  std::vector<double> x_values;
};

struct SweepOptions {
  std::vector<std::size_t> m_values{1000, 2000, 5000, 10000};
  std::size_t trials = 100;
  std::size_t replicates = 5;
  std::uint64_t seed = 1;
};

/// Noiseless alpha-PA, uniform victim; one series per alpha.
Sweep fig2_sweep(const SweepOptions& options, const std::vector<double>& alphas = {0.25, 0.5, 1.0});

/// Noiseless scan; query channel theta of user k mixes BSC(0.01) and BSC(0.3) with
/// weight theta / (2^level - 1) on the former. One series per level.
Sweep fig3_sweep(const SweepOptions& options, const std::vector<std::size_t>& levels = {1, 2, 3, 4, 5});

/// Noiseless query; scan channel gamma in 1..k mixes BSC(0.01) and BSC(0.3) with
/// weight (gamma - 1) / (k - 1) on the former. One series per k.
Sweep fig4_sweep(const SweepOptions& options, const std::vector<std::size_t>& sizes = {2, 4, 8, 16, 32});

/// Real-data sweep over omission probabilities applied to both scan and query.
/// The x axis of this sweep is the omission probability, not m.
Sweep fig5_sweep(const std::string& snap_path, std::size_t trials, std::uint64_t seed,
                 const std::vector<double>& omissions = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1});

Sweep sweep_by_name(const std::string& name, const SweepOptions& options, const std::string& snap_path = {});

std::vector<ExperimentResult> run_sweep(const Sweep& sweep, std::size_t jobs = 1);

}  // namespace deanon
