#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deanon/attacker.hpp"
#include "deanon/core.hpp"

namespace deanon {

enum class Assignment { RoundRobin, Random, Explicit };

/// Channel sets plus the rule that assigns a scan and a query channel to each user.
struct NoiseSpec {
  std::vector<LabeledChannel> gamma;
  std::vector<LabeledChannel> theta;
  Assignment assignment = Assignment::RoundRobin;
  std::vector<std::uint32_t> gamma_of_user;  // Explicit only
  std::vector<std::uint32_t> theta_of_user;  // Explicit only

  /// Round-robin assigns user k to gamma k mod |Gamma| and theta k mod |Theta|;
  /// random draws both labels uniformly from `rng`.
  NoiseModel build(std::size_t num_users, Rng& rng) const;

  static NoiseSpec noiseless();
};

struct VictimSpec {
  VictimKind kind = VictimKind::Uniform;
  double zipf_exponent = 1.0;
  std::vector<double> weights;

  VictimDistribution build(std::size_t num_users) const;
};

/// Real-data source replacing the generator.
struct SnapSource {
  std::string path;
  std::size_t min_group_size = 0;
  std::size_t min_user_memberships = 0;
};

struct ExperimentConfig {
  std::string experiment = "experiment";
  /// Plot series this run belongs to; empty means the experiment id.
  std::string series;
  GenerationParams generation;
  std::optional<SnapSource> snap;
  NoiseSpec noise = NoiseSpec::noiseless();
  VictimSpec victim;
  ItsConfig its;
  double c_prime = 1.0;
  std::size_t trials = 1;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  /// Wall time is excluded by default so identical configs give identical records.
  bool record_timing = false;
  std::string output_dir = "out";
  std::vector<std::string> formats{"csv", "svg", "json"};

  void validate() const;
};

/// Parses a channel description, e.g. {"kind": "bsc", "p": 0.01}.
BinaryChannel channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const BinaryChannel& channel);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

}  // namespace deanon
