#include "deanon/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "deanon/channel.hpp"

namespace deanon {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw std::invalid_argument("config: " + what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

std::string assignment_name(Assignment a) {
  switch (a) {
    case Assignment::RoundRobin: return "round_robin";
    case Assignment::Random: return "random";
    case Assignment::Explicit: return "explicit";
  }
  return "round_robin";
}

Assignment assignment_from_string(const std::string& s) {
  if (s == "round_robin" || s == "round-robin") return Assignment::RoundRobin;
  if (s == "random") return Assignment::Random;
  if (s == "explicit") return Assignment::Explicit;
  config_error("unknown noise assignment '" + s + "'");
}

std::vector<LabeledChannel> channels_from_json(const json& arr, const char* prefix) {
  std::vector<LabeledChannel> out;
  if (!arr.is_array()) config_error(std::string("noise.") + prefix + " must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& item = arr[i];
    std::string label = get_or<std::string>(item, "label", std::string(prefix) + std::to_string(i));
    out.push_back({std::move(label), channel_from_json(item)});
  }
  return out;
}

json channels_to_json(const std::vector<LabeledChannel>& channels) {
  json arr = json::array();
  for (const auto& c : channels) {
    json item = channel_to_json(c.channel);
    item["label"] = c.label;
    arr.push_back(std::move(item));
  }
  return arr;
}

}  // namespace

BinaryChannel channel_from_json(const json& j) {
  const std::string kind = get_or<std::string>(j, "kind", "identity");
  if (kind == "identity" || kind == "noiseless") return channels::identity();
  if (kind == "bsc") return channels::bsc(j.at("p").get<double>());
  if (kind == "omission" || kind == "erasure") {
    const double s = j.contains("s") ? j.at("s").get<double>() : j.at("e").get<double>();
    return channels::omission(s);
  }
  if (kind == "constant") return channels::constant(j.at("q").get<double>());
  if (kind == "mixture") {
    return channels::mixture(j.at("w").get<double>(), channel_from_json(j.at("a")), channel_from_json(j.at("b")));
  }
  if (kind == "matrix") {
    const auto& p = j.at("p");
    BinaryChannel::Matrix mat{};
    for (int in = 0; in < 2; ++in) {
      for (int out = 0; out < 2; ++out) mat[in][out] = p.at(in).at(out).get<double>();
    }
    return BinaryChannel(mat);
  }
  config_error("unknown channel kind '" + kind + "'");
}

json channel_to_json(const BinaryChannel& channel) {
  const auto& p = channel.matrix();
  return json{{"kind", "matrix"}, {"p", {{p[0][0], p[0][1]}, {p[1][0], p[1][1]}}}};
}

NoiseModel NoiseSpec::build(std::size_t num_users, Rng& rng) const {
  NoiseModel model;
  model.gamma_channels = gamma;
  model.theta_channels = theta;
  switch (assignment) {
    case Assignment::RoundRobin:
      model.gamma_of_user.resize(num_users);
      model.theta_of_user.resize(num_users);
      for (std::size_t k = 0; k < num_users; ++k) {
        model.gamma_of_user[k] = static_cast<std::uint32_t>(k % gamma.size());
        model.theta_of_user[k] = static_cast<std::uint32_t>(k % theta.size());
      }
      break;
    case Assignment::Random:
      model.gamma_of_user.resize(num_users);
      model.theta_of_user.resize(num_users);
      for (std::size_t k = 0; k < num_users; ++k) {
        model.gamma_of_user[k] = static_cast<std::uint32_t>(rng.below(gamma.size()));
        model.theta_of_user[k] = static_cast<std::uint32_t>(rng.below(theta.size()));
      }
      break;
    case Assignment::Explicit:
      model.gamma_of_user = gamma_of_user;
      model.theta_of_user = theta_of_user;
      break;
  }
  model.validate(num_users);
  return model;
}

NoiseSpec NoiseSpec::noiseless() {
  NoiseSpec spec;
  spec.gamma.push_back({"noiseless", channels::identity()});
  spec.theta.push_back({"noiseless", channels::identity()});
  return spec;
}

VictimDistribution VictimSpec::build(std::size_t num_users) const {
  switch (kind) {
    case VictimKind::Uniform: return VictimDistribution::uniform(num_users);
    case VictimKind::ZipfNormalized: return VictimDistribution::zipf(num_users, zipf_exponent);
    case VictimKind::Custom:
      if (weights.size() != num_users) config_error("victim.params.weights must have one entry per user");
      return VictimDistribution::custom(weights);
  }
  return VictimDistribution::uniform(num_users);
}

void ExperimentConfig::validate() const {
  if (trials < 1) config_error("run.trials must be >= 1");
  if (replicates < 1) config_error("run.replicates must be >= 1");
  if (!snap) generation.validate();
  its.validate();
  if (noise.gamma.empty() || noise.theta.empty()) config_error("noise needs at least one gamma and one theta channel");
  if (!(c_prime > 0.0 && c_prime <= 1.0)) config_error("its.c_prime must lie in (0, 1]");
  if (noise.assignment == Assignment::Explicit && !snap) {
    if (noise.gamma_of_user.size() != generation.m || noise.theta_of_user.size() != generation.m)
      config_error("explicit noise assignment must list every user");
  }
  for (auto g : noise.gamma_of_user) {
    if (g >= noise.gamma.size()) config_error("noise.gamma_of_user references an undefined channel");
  }
  for (auto t : noise.theta_of_user) {
    if (t >= noise.theta.size()) config_error("noise.theta_of_user references an undefined channel");
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.experiment = get_or<std::string>(j, "experiment", c.experiment);
  c.series = get_or<std::string>(j, "series", "");

  const json& gen = j.at("generation");
  GenerationParams& p = c.generation;
  p.m = gen.at("m").get<std::size_t>();
  if (gen.contains("n")) {
    p.n = gen.at("n").get<std::size_t>();
  } else if (gen.contains("beta")) {
    p.n = static_cast<std::size_t>(std::llround(static_cast<double>(p.m) / gen.at("beta").get<double>()));
  } else if (gen.contains("tau0")) {
    p.n = gen.at("tau0").size();
  }
  p.mu = gen.at("mu").get<std::size_t>();
  p.model = model_kind_from_string(get_or<std::string>(gen, "model", "alpha_pa"));
  p.alpha = p.model == ModelKind::AlphaPA ? get_or<double>(gen, "alpha", 1.0) : get_or<double>(gen, "alpha", 0.0);
  if (gen.contains("tau0")) {
    p.tau0 = gen.at("tau0").get<std::vector<double>>();
  } else {
    p.tau0.assign(p.n, 1.0);
  }
  if (gen.contains("snap")) {
    const json& s = gen.at("snap");
    c.snap = SnapSource{s.at("path").get<std::string>(), get_or<std::size_t>(s, "min_group_size", 0),
                        get_or<std::size_t>(s, "min_user_memberships", 0)};
  }

  if (j.contains("noise")) {
    const json& nz = j.at("noise");
    c.noise.gamma = nz.contains("gamma") ? channels_from_json(nz.at("gamma"), "gamma") : NoiseSpec::noiseless().gamma;
    c.noise.theta = nz.contains("theta") ? channels_from_json(nz.at("theta"), "theta") : NoiseSpec::noiseless().theta;
    c.noise.assignment = assignment_from_string(get_or<std::string>(nz, "assignment", "round_robin"));
    c.noise.gamma_of_user = get_or<std::vector<std::uint32_t>>(nz, "gamma_of_user", {});
    c.noise.theta_of_user = get_or<std::vector<std::uint32_t>>(nz, "theta_of_user", {});
  }

  if (j.contains("victim")) {
    const json& v = j.at("victim");
    const std::string kind = get_or<std::string>(v, "kind", "uniform");
    const json params = v.contains("params") ? v.at("params") : json::object();
    if (kind == "uniform") {
      c.victim.kind = VictimKind::Uniform;
    } else if (kind == "zipf") {
      c.victim.kind = VictimKind::ZipfNormalized;
      c.victim.zipf_exponent = get_or<double>(params, "exponent", 1.0);
    } else if (kind == "custom") {
      c.victim.kind = VictimKind::Custom;
      c.victim.weights = params.at("weights").get<std::vector<double>>();
    } else {
      config_error("unknown victim kind '" + kind + "'");
    }
  }

  const json its = j.contains("its") ? j.at("its") : json::object();
  const ItsVariant variant = its_variant_from_string(get_or<std::string>(its, "variant", "T1_NOISELESS_QUERY"));
  c.its = ItsConfig::make(variant, get_or<double>(its, "epsilon", 0.01));
  if (its.contains("query_order")) c.its.order = query_order_from_string(its.at("query_order").get<std::string>());
  c.its.min_queries_floor = get_or<std::size_t>(its, "min_queries_floor", 0);
  if (its.contains("max_queries") && !its.at("max_queries").is_null())
    c.its.max_queries = its.at("max_queries").get<std::size_t>();
  c.c_prime = get_or<double>(its, "c_prime", 1.0);

  const json run = j.contains("run") ? j.at("run") : json::object();
  c.trials = get_or<std::size_t>(run, "trials", 1);
  c.replicates = get_or<std::size_t>(run, "replicates", 1);
  c.seed = get_or<std::uint64_t>(run, "seed", 1);
  c.record_timing = get_or<bool>(run, "record_timing", false);

  const json out = j.contains("output") ? j.at("output") : json::object();
  c.output_dir = get_or<std::string>(out, "dir", c.output_dir);
  c.formats = get_or<std::vector<std::string>>(out, "formats", c.formats);

  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json gen{{"n", c.generation.n},
           {"m", c.generation.m},
           {"mu", c.generation.mu},
           {"alpha", c.generation.alpha},
           {"model", to_string(c.generation.model)},
           {"tau0", c.generation.tau0}};
  if (c.snap) {
    gen["snap"] = {{"path", c.snap->path},
                   {"min_group_size", c.snap->min_group_size},
                   {"min_user_memberships", c.snap->min_user_memberships}};
  }
  json noise{{"gamma", channels_to_json(c.noise.gamma)},
             {"theta", channels_to_json(c.noise.theta)},
             {"assignment", assignment_name(c.noise.assignment)}};
  if (c.noise.assignment == Assignment::Explicit) {
    noise["gamma_of_user"] = c.noise.gamma_of_user;
    noise["theta_of_user"] = c.noise.theta_of_user;
  }
  json victim;
  switch (c.victim.kind) {
    case VictimKind::Uniform: victim = {{"kind", "uniform"}, {"params", json::object()}}; break;
    case VictimKind::ZipfNormalized: victim = {{"kind", "zipf"}, {"params", {{"exponent", c.victim.zipf_exponent}}}}; break;
    case VictimKind::Custom: victim = {{"kind", "custom"}, {"params", {{"weights", c.victim.weights}}}}; break;
  }
  json its{{"epsilon", c.its.epsilon},
           {"variant", to_string(c.its.variant)},
           {"query_order", to_string(c.its.order)},
           {"min_queries_floor", c.its.min_queries_floor},
           {"c_prime", c.c_prime}};
  if (c.its.max_queries) its["max_queries"] = *c.its.max_queries;
  return json{{"experiment", c.experiment},
              {"series", c.series},
              {"generation", gen},
              {"noise", noise},
              {"victim", victim},
              {"its", its},
              {"run", {{"trials", c.trials}, {"replicates", c.replicates}, {"seed", c.seed}, {"record_timing", c.record_timing}}},
              {"output", {{"dir", c.output_dir}, {"formats", c.formats}}}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace deanon
