#include "deanon/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "deanon/rng.hpp"

namespace deanon {

using nlohmann::json;

namespace {

std::string num(double v, const char* fmt = "%.10g") {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Quotes a CSV field only when it needs it.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir + ": cannot create directory: " + ec.message());
}

bool wants(const std::vector<std::string>& formats, const std::string& f) {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

}  // namespace

std::string results_csv(const std::vector<ResultRecord>& records) {
  if (records.empty()) throw std::invalid_argument("emit: no records to write");
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.experiment) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.replicate) + ',' +
           std::to_string(r.trial) + ',' + std::to_string(r.m) + ',' + std::to_string(r.n) + ',' +
           num(r.alpha, "%g") + ',' + csv_field(r.variant) + ',' + std::to_string(r.q) + ',' +
           (r.correct ? "1" : "0") + ',' + (r.exhausted ? "1" : "0") + ',' + num(r.elapsed_ms, "%.3f") + '\n';
  }
  return out;
}

std::string summary_csv(const std::vector<ExperimentSummary>& summaries) {
  if (summaries.empty()) throw std::invalid_argument("emit: empty summary");
  std::string out =
      "experiment,series,variant,seed,m,n,alpha,mu,epsilon,x,trials,failed,mean_q,std_error_q,adjusted_q,"
      "success_rate,error_rate,misidentification_rate,exhausted_rate,skipped_steps,q_bar_bound,pe_bound,"
      "bound_respected\n";
  for (const auto& s : summaries) {
    out += csv_field(s.experiment) + ',' + csv_field(s.series) + ',' + s.variant + ',' + std::to_string(s.seed) + ',' +
           std::to_string(s.m) + ',' + std::to_string(s.n) + ',' + num(s.alpha, "%g") + ',' + std::to_string(s.mu) +
           ',' + num(s.epsilon, "%g") + ',' + num(s.x, "%g") + ',' + std::to_string(s.trials) + ',' +
           std::to_string(s.failed) + ',' + num(s.mean_q) + ',' + num(s.std_error_q) + ',' + num(s.adjusted_q) + ',' +
           num(s.success_rate) + ',' + num(s.error_rate) + ',' + num(s.misidentification_rate) + ',' +
           num(s.exhausted_rate) + ',' + std::to_string(s.skipped_steps) + ',' +
           (s.bound ? num(s.bound->q_bar_bound) : "") + ',' + (s.bound ? num(s.bound->pe_bound) : "") + ',' +
           (s.bound_respected ? (*s.bound_respected ? "1" : "0") : "") + '\n';
  }
  return out;
}

double metric_value(const ExperimentSummary& s, SweepMetric metric) {
  switch (metric) {
    case SweepMetric::AdjustedQ: return s.adjusted_q;
    case SweepMetric::MeanQ: return s.mean_q;
    case SweepMetric::SuccessRate: return s.success_rate;
  }
  return 0.0;
}

std::string svg_plot(const std::vector<ExperimentSummary>& summaries, const PlotSpec& spec) {
  if (summaries.empty()) throw std::invalid_argument("emit: empty summary");

  // Series in first-appearance order.
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& s : summaries) {
    if (!series.contains(s.series)) names.push_back(s.series);
    series[s.series].emplace_back(s.x, metric_value(s, spec.metric));
  }
  if (spec.reference_two_m_over_mu) {
    std::map<double, double> ref;
    for (const auto& s : summaries) {
      if (s.mu > 0) ref[s.x] = 2.0 * static_cast<double>(s.m) / static_cast<double>(s.mu);
    }
    const std::string name = "2m/mu";
    names.push_back(name);
    for (const auto& [x, y] : ref) series[name].emplace_back(x, y);
  }
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  y_lo = std::min(0.0, y_lo);
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  y_hi += 0.05 * (y_hi - y_lo);

  const double width = 720, height = 440, left = 70, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return top + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width, "%g") + "\" height=\"" +
         num(height, "%g") + "\" viewBox=\"0 0 " + num(width, "%g") + ' ' + num(height, "%g") +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left + pw / 2, "%.2f") + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(spec.title) + "</text>\n";
  out += "<g stroke=\"black\"><line x1=\"" + num(left, "%.2f") + "\" y1=\"" + num(top + ph, "%.2f") + "\" x2=\"" +
         num(left + pw, "%.2f") + "\" y2=\"" + num(top + ph, "%.2f") + "\"/><line x1=\"" + num(left, "%.2f") +
         "\" y1=\"" + num(top, "%.2f") + "\" x2=\"" + num(left, "%.2f") + "\" y2=\"" + num(top + ph, "%.2f") +
         "\"/></g>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 5.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 5.0;
    out += "<text x=\"" + num(sx(xv), "%.2f") + "\" y=\"" + num(top + ph + 18, "%.2f") +
           "\" text-anchor=\"middle\">" + num(xv, "%.4g") + "</text>\n";
    out += "<text x=\"" + num(left - 6, "%.2f") + "\" y=\"" + num(sy(yv) + 4, "%.2f") + "\" text-anchor=\"end\">" +
           num(yv, "%.4g") + "</text>\n";
    out += "<line x1=\"" + num(left, "%.2f") + "\" y1=\"" + num(sy(yv), "%.2f") + "\" x2=\"" +
           num(left + pw, "%.2f") + "\" y2=\"" + num(sy(yv), "%.2f") + "\" stroke=\"#dddddd\"/>\n";
  }
  out += "<text x=\"" + num(left + pw / 2, "%.2f") + "\" y=\"" + num(height - 16, "%.2f") +
         "\" text-anchor=\"middle\">" + xml_escape(spec.x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + num(top + ph / 2, "%.2f") + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(to_string(spec.metric)) + "</text>\n";

  for (std::size_t i = 0; i < names.size(); ++i) {
    const bool reference = spec.reference_two_m_over_mu && i + 1 == names.size();
    const std::string color = reference ? "#000000" : kPalette[i % std::size(kPalette)];
    const auto& pts = series[names[i]];
    std::string poly;
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(y)) continue;
      if (!poly.empty()) poly += ' ';
      poly += num(sx(x), "%.2f") + ',' + num(sy(y), "%.2f");
    }
    out += "<g><title>" + xml_escape(names[i]) + "</title><polyline fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"" + (reference ? " stroke-dasharray=\"6 4\"" : "") + " points=\"" + poly +
           "\"/>\n";
    if (!reference) {
      for (const auto& [x, y] : pts) {
        if (!std::isfinite(y)) continue;
        out += "<circle cx=\"" + num(sx(x), "%.2f") + "\" cy=\"" + num(sy(y), "%.2f") + "\" r=\"3.5\" fill=\"" +
               color + "\"/>\n";
      }
    }
    out += "</g>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    out += "<line x1=\"" + num(left + pw + 15, "%.2f") + "\" y1=\"" + num(ly, "%.2f") + "\" x2=\"" +
           num(left + pw + 40, "%.2f") + "\" y2=\"" + num(ly, "%.2f") + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/><text x=\"" + num(left + pw + 46, "%.2f") + "\" y=\"" + num(ly + 4, "%.2f") +
           "\">" + xml_escape(names[i]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

json to_json(const bounds::BoundReport& report) {
  json components = json::object();
  for (const auto& [k, v] : report.components) components[k] = finite_or_null(v);
  return {{"kind", report.kind},
          {"q_bar_bound", finite_or_null(report.q_bar_bound)},
          {"pe_bound", finite_or_null(report.pe_bound)},
          {"vacuous", report.vacuous},
          {"components", components}};
}

json to_json(const ExperimentSummary& s) {
  json j{{"experiment", s.experiment},
         {"series", s.series},
         {"variant", s.variant},
         {"seed", s.seed},
         {"m", s.m},
         {"n", s.n},
         {"alpha", s.alpha},
         {"mu", s.mu},
         {"epsilon", s.epsilon},
         {"x", s.x},
         {"trials", s.trials},
         {"failed", s.failed},
         {"mean_q", s.mean_q},
         {"std_error_q", s.std_error_q},
         {"adjusted_q", s.adjusted_q},
         {"success_rate", s.success_rate},
         {"error_rate", s.error_rate},
         {"misidentification_rate", s.misidentification_rate},
         {"exhausted_rate", s.exhausted_rate},
         {"skipped_steps", s.skipped_steps}};
  j["bound"] = s.bound ? to_json(*s.bound) : json(nullptr);
  j["bound_respected"] = s.bound_respected ? json(*s.bound_respected) : json(nullptr);
  return j;
}

json manifest_json(const std::string& name, const std::vector<ExperimentResult>& results,
                   const std::vector<std::string>& files) {
  json runs = json::array();
  for (const auto& r : results) {
    json run{{"seed", r.config.seed}, {"config", to_json(r.config)}, {"summary", to_json(r.summary)},
             {"skipped_steps_per_replicate", r.skipped_steps}};
    json errors = json::array();
    for (const auto& rec : r.records) {
      if (!rec.error.empty())
        errors.push_back({{"replicate", rec.replicate}, {"trial", rec.trial}, {"error", rec.error}});
    }
    run["errors"] = errors;
    if (r.snap_manifest) run["snap"] = *r.snap_manifest;
    runs.push_back(std::move(run));
  }
  return {{"name", name}, {"rng", kRngAlgorithm}, {"runs", runs}, {"files", files}};
}

namespace {

std::vector<std::string> emit_all(const std::string& name, const std::vector<ExperimentResult>& results,
                                  const std::vector<PlotSpec>& plots, const std::string& dir,
                                  const std::vector<std::string>& formats) {
  if (results.empty()) throw std::invalid_argument("emit: no results");
  std::vector<ResultRecord> records;
  std::vector<ExperimentSummary> summaries;
  for (const auto& r : results) {
    records.insert(records.end(), r.records.begin(), r.records.end());
    summaries.push_back(r.summary);
  }
  if (records.empty()) throw std::invalid_argument("emit: no records to write");
  ensure_dir(dir);
  const std::filesystem::path base(dir);
  std::vector<std::string> files;
  if (wants(formats, "csv")) {
    const auto results_path = base / (name + "_results.csv");
    write_file(results_path, results_csv(records));
    files.push_back(results_path.string());
    const auto summary_path = base / (name + "_summary.csv");
    write_file(summary_path, summary_csv(summaries));
    files.push_back(summary_path.string());
  }
  if (wants(formats, "svg")) {
    for (const auto& plot : plots) {
      const auto path = base / (name + "_" + to_string(plot.metric) + ".svg");
      write_file(path, svg_plot(summaries, plot));
      files.push_back(path.string());
    }
  }
  if (wants(formats, "json")) {
    const auto path = base / (name + "_manifest.json");
    std::vector<std::string> listed = files;
    listed.push_back(path.string());
    write_file(path, manifest_json(name, results, listed).dump(2) + "\n");
    files.push_back(path.string());
  }
  return files;
}

}  // namespace

std::vector<std::string> emit_results(const ExperimentResult& result, const std::string& dir,
                                      const std::vector<std::string>& formats) {
  PlotSpec spec;
  spec.title = result.config.experiment;
  spec.metric = SweepMetric::MeanQ;
  return emit_all(result.config.experiment, {result}, {spec}, dir, formats);
}

std::vector<std::string> emit_sweep(const Sweep& sweep, const std::vector<ExperimentResult>& results,
                                    const std::string& dir, const std::vector<std::string>& formats) {
  std::vector<PlotSpec> plots;
  for (SweepMetric metric : sweep.metrics) {
    PlotSpec spec;
    spec.title = sweep.name + ": " + to_string(metric);
    spec.x_label = sweep.x_label;
    spec.metric = metric;
    spec.reference_two_m_over_mu = sweep.reference_two_m_over_mu;
    plots.push_back(std::move(spec));
  }
  return emit_all(sweep.name, results, plots, dir, formats);
}

}  // namespace deanon
