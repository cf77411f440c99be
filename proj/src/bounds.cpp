#include "deanon/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace deanon::bounds {

using channels::kInfinity;

double entropy_of_victim(const VictimDistribution& dist) {
  double h = 0.0;
  for (UserId k = 0; k < dist.size(); ++k) {
    const double p = dist.probability(k);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("bounds: epsilon must lie in (0, 1)");
}

void check_c_prime(double c_prime) {
  if (!(c_prime > 0.0 && c_prime <= 1.0)) throw std::invalid_argument("bounds: c' must lie in (0, 1]");
}

void check_prior(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bounds: edge prior must lie in (0, 1)");
}

std::string pair_key(const std::string& a, const std::string& b) { return a + "|" + b; }

// max_{y,f} ln(P(y | f) / P(y)) for the response-vs-scan pair.
double response_i_max(double edge_prior, const BinaryChannel& scan, const BinaryChannel& query) {
  const channels::Posterior post = channels::posterior(edge_prior, scan);
  const double y1 = channels::output_probability(edge_prior, query);
  const std::array<double, 2> marginal{1.0 - y1, y1};
  double best = -kInfinity;
  for (int f = 0; f < 2; ++f) {
    if (!post.defined[f]) continue;
    for (int y = 0; y < 2; ++y) {
      if (marginal[y] <= 0.0) continue;
      const double lik = post.given_out[f][0] * query(y, 0) + post.given_out[f][1] * query(y, 1);
      if (lik > 0.0) best = std::max(best, std::log(lik / marginal[y]));
    }
  }
  return best;
}

}  // namespace

double response_scan_information(double edge_prior, const BinaryChannel& scan, const BinaryChannel& query) {
  const channels::Posterior post = channels::posterior(edge_prior, scan);
  // A scanned bit that never varies carries no information.
  if (!post.defined[0] || !post.defined[1]) return 0.0;
  const double scan_one = channels::output_probability(edge_prior, scan);
  return channels::mutual_information(scan_one, channels::compose(post.as_channel(), query));
}

BoundReport theorem1_bound(double edge_prior, const BinaryChannel& scan, const VictimDistribution& dist,
                           double epsilon, double c_prime) {
  check_epsilon(epsilon);
  check_c_prime(c_prime);
  check_prior(edge_prior);

  BoundReport report;
  report.kind = "theorem1";
  const double h = entropy_of_victim(dist);
  const double log_inv_eps = std::log(1.0 / epsilon);
  const double imax = channels::i_max(edge_prior, scan);
  const double info = channels::mutual_information(edge_prior, scan);
  report.components = {{"H(M)", h},        {"ln(1/eps)", log_inv_eps}, {"i_max", imax},
                       {"I(E0;Es)", info}, {"c_prime", c_prime},       {"edge_prior", edge_prior}};
  report.pe_bound = epsilon / c_prime;
  if (info <= 0.0 || !std::isfinite(imax)) {
    report.vacuous = true;
    report.q_bar_bound = kInfinity;
  } else {
    report.q_bar_bound = (h + log_inv_eps + imax) / (c_prime * info);
  }
  if (report.pe_bound >= 1.0) report.vacuous = true;
  return report;
}

BoundReport theorem1_bound(const GenerationParams& params, const BinaryChannel& scan, const VictimDistribution& dist,
                           double epsilon, double c_prime) {
  params.validate();
  return theorem1_bound(edge_prior(params), scan, dist, epsilon, c_prime);
}

BoundReport theorem2_bound(const GenerationParams& params, const BinaryChannel& scan, const VictimDistribution& dist,
                           double epsilon) {
  params.validate();
  check_epsilon(epsilon);

  // Communities in query order (descending tau0) with their sizes.
  std::map<double, std::size_t, std::greater<>> sizes;
  for (double t : params.tau0) ++sizes[t];
  const double tau_mass = std::accumulate(params.tau0.begin(), params.tau0.end(), 0.0);
  const double scale = static_cast<double>(params.mu) / params.beta();

  struct Community {
    double tau;
    std::size_t size;
    double prior;
    double info;
  };
  std::vector<Community> communities;
  double imax = -kInfinity;
  for (const auto& [tau, size] : sizes) {
    const double prior = tau / tau_mass * scale;
    check_prior(prior);
    communities.push_back({tau, size, prior, channels::mutual_information(prior, scan)});
    imax = std::max(imax, channels::i_max(prior, scan));
  }

  BoundReport report;
  report.kind = "theorem2";
  const double h = entropy_of_victim(dist);
  const double log_inv_eps = std::log(1.0 / epsilon);
  const double psi = h + log_inv_eps + imax;
  report.components = {{"H(M)", h}, {"ln(1/eps)", log_inv_eps}, {"i_max", imax}, {"psi", psi}};
  for (const auto& c : communities) {
    const std::string tag = "[tau=" + std::to_string(c.tau) + "]";
    report.components["size" + tag] = static_cast<double>(c.size);
    report.components["prior" + tag] = c.prior;
    report.components["I(E0;Es)" + tag] = c.info;
  }
  report.pe_bound = epsilon;

  if (!std::isfinite(psi)) {
    report.vacuous = true;
    report.q_bar_bound = kInfinity;
    return report;
  }

  double accumulated = 0.0;
  std::size_t queries_before = 0;
  for (std::size_t l = 0; l < communities.size(); ++l) {
    const auto& c = communities[l];
    const double reach = accumulated + static_cast<double>(c.size) * c.info;
    if (c.info > 0.0 && reach >= psi) {
      const double i_star = std::max(0.0, std::ceil((psi - accumulated) / c.info));
      report.components["tau_star"] = c.tau;
      report.components["full_communities"] = static_cast<double>(l);
      report.components["queries_before"] = static_cast<double>(queries_before);
      report.components["i_star"] = i_star;
      report.q_bar_bound = static_cast<double>(queries_before) + i_star;
      return report;
    }
    accumulated = reach;
    queries_before += c.size;
  }
  // Querying every group does not accumulate psi.
  report.vacuous = true;
  report.components["queries_before"] = static_cast<double>(queries_before);
  report.components["i_star"] = 0.0;
  report.q_bar_bound = static_cast<double>(params.n);
  return report;
}

BoundReport theorem3_bound(double edge_prior, const NoiseModel& noise, const VictimDistribution& dist,
                           double epsilon, double c_prime) {
  check_epsilon(epsilon);
  check_c_prime(c_prime);
  check_prior(edge_prior);
  const std::size_t m = noise.gamma_of_user.size();
  noise.validate(m);
  if (dist.size() != m) throw std::invalid_argument("bounds: victim distribution must cover every user");

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> counts;
  for (std::size_t k = 0; k < m; ++k) ++counts[{noise.gamma_of_user[k], noise.theta_of_user[k]}];

  BoundReport report;
  report.kind = "theorem3";
  const double h = entropy_of_victim(dist);
  const double log_inv_eps = std::log(1.0 / epsilon);
  double imax = -kInfinity;
  double imax_response = -kInfinity;
  for (const auto& [key, count] : counts) {
    const auto& scan = noise.gamma_channels[key.first].channel;
    const auto& query = noise.theta_channels[key.second].channel;
    imax = std::max(imax, channels::i_max(edge_prior, scan));
    imax_response = std::max(imax_response, response_i_max(edge_prior, scan, query));
  }
  report.components = {{"H(M)", h},           {"ln(1/eps)", log_inv_eps},
                       {"i_max", imax},       {"i_max(Y;Es)", imax_response},
                       {"c_prime", c_prime},  {"edge_prior", edge_prior},
                       {"num_gamma", static_cast<double>(noise.gamma_channels.size())}};
  report.pe_bound = static_cast<double>(noise.gamma_channels.size()) * epsilon / c_prime;

  const double numerator = h + log_inv_eps + imax;
  double q = 0.0;
  for (const auto& [key, count] : counts) {
    const auto& gamma = noise.gamma_channels[key.first];
    const auto& theta = noise.theta_channels[key.second];
    const double weight = static_cast<double>(count) / static_cast<double>(m);
    const double info = response_scan_information(edge_prior, gamma.channel, theta.channel);
    const std::string tag = pair_key(gamma.label, theta.label);
    report.components["weight[" + tag + "]"] = weight;
    report.components["I(Y;Es)[" + tag + "]"] = info;
    if (info <= 0.0) report.vacuous = true;
    else q += weight * numerator / (c_prime * info);
  }
  if (!std::isfinite(numerator)) report.vacuous = true;
  report.q_bar_bound = report.vacuous ? kInfinity : q;
  if (report.pe_bound >= 1.0) report.vacuous = true;
  return report;
}

BoundReport theorem3_bound(const GenerationParams& params, const NoiseModel& noise, const VictimDistribution& dist,
                           double epsilon, double c_prime) {
  params.validate();
  return theorem3_bound(edge_prior(params), noise, dist, epsilon, c_prime);
}

std::pair<double, double> recombine(const BoundReport& report) {
  const auto& c = report.components;
  auto get = [&](const std::string& name) {
    auto it = c.find(name);
    if (it == c.end()) throw std::invalid_argument("recombine: missing component " + name);
    return it->second;
  };
  const double eps = std::exp(-get("ln(1/eps)"));
  if (report.kind == "theorem1") {
    const double cp = get("c_prime");
    const double q = (get("H(M)") + get("ln(1/eps)") + get("i_max")) / (cp * get("I(E0;Es)"));
    return {q, eps / cp};
  }
  if (report.kind == "theorem2") {
    if (report.vacuous) return {report.q_bar_bound, eps};
    return {get("queries_before") + get("i_star"), eps};
  }
  if (report.kind == "theorem3") {
    const double cp = get("c_prime");
    const double numerator = get("H(M)") + get("ln(1/eps)") + get("i_max");
    double q = 0.0;
    for (const auto& [name, weight] : c) {
      if (name.rfind("weight[", 0) != 0) continue;
      const std::string tag = name.substr(7);
      q += weight * numerator / (cp * get("I(Y;Es)[" + tag));
    }
    return {q, get("num_gamma") * eps / cp};
  }
  throw std::invalid_argument("recombine: unknown report kind " + report.kind);
}

TailBound prop2_tail_bound(const GenerationParams& params, double psi) {
  params.validate();
  const double q = edge_prior(params);
  const double upper = static_cast<double>(params.m) / static_cast<double>(params.mu) - 1.0;
  if (!(psi > 0.0 && psi <= upper + 1e-12))
    throw std::invalid_argument("prop2_tail_bound: psi must lie in (0, m/mu - 1]");
  const double p = std::min(1.0, q * (1.0 + psi));
  TailBound out;
  out.threshold = static_cast<double>(params.mu) * (1.0 + psi) / params.beta();
  out.kl_nats = channels::binary_kl(p, q);
  out.exponent_bits = static_cast<double>(params.n) * out.kl_nats / std::numbers::ln2;
  out.bound = std::exp2(-out.exponent_bits);
  return out;
}

}  // namespace deanon::bounds
