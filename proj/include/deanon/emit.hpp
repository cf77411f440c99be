#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "deanon/experiment.hpp"

namespace deanon {

inline constexpr const char* kResultsHeader =
    "experiment,seed,replicate,trial,m,n,alpha,variant,Q,correct,exhausted,elapsed_ms";

/// Results CSV, LF line endings. Throws std::invalid_argument on empty input.
std::string results_csv(const std::vector<ResultRecord>& records);

/// One row per summary, in the given order. Throws on empty input.
std::string summary_csv(const std::vector<ExperimentSummary>& summaries);

struct PlotSpec {
  std::string title;
  std::string x_label = "m";
  SweepMetric metric = SweepMetric::MeanQ;
  /// Adds y = 2m/mu evaluated at every distinct x.
  bool reference_two_m_over_mu = false;
};

double metric_value(const ExperimentSummary& summary, SweepMetric metric);

/// Line/scatter plot with one series per summary.series, points sorted by x.
/// Throws on empty input.
std::string svg_plot(const std::vector<ExperimentSummary>& summaries, const PlotSpec& spec);

nlohmann::json to_json(const ExperimentSummary& summary);
nlohmann::json to_json(const bounds::BoundReport& report);

/// Seeds, RNG algorithm, configs, summaries and the files written.
nlohmann::json manifest_json(const std::string& name, const std::vector<ExperimentResult>& results,
                             const std::vector<std::string>& files);

/// Writes `<dir>/<experiment>_results.csv`, `_summary.csv`, `_plot.svg` and
/// `_manifest.json` for the requested formats ("csv", "svg", "json").
/// Returns the paths written. I/O errors name the offending path.
std::vector<std::string> emit_results(const ExperimentResult& result, const std::string& dir,
                                      const std::vector<std::string>& formats);

/// Same for a sweep: all records in one CSV, one SVG per metric.
std::vector<std::string> emit_sweep(const Sweep& sweep, const std::vector<ExperimentResult>& results,
                                    const std::string& dir, const std::vector<std::string>& formats);

}  // namespace deanon
