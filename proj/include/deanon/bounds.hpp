#pragma once

#include <map>
#include <string>

#include "deanon/channel.hpp"
#include "deanon/core.hpp"

namespace deanon::bounds {

/// Closed-form guarantee for one attack configuration.
///
/// `components` holds every intermediate quantity under a stable name so the
/// bound can be recomputed from the report alone (see `recombine`).
struct BoundReport {
  double q_bar_bound = 0.0;
  double pe_bound = 0.0;
  std::map<std::string, double> components;
  bool vacuous = false;
  std::string kind;
};

/// H(M) in nats.
double entropy_of_victim(const VictimDistribution& dist);

/// Expected-query and error bounds for noiseless responses and one scan channel:
/// q = (H(M) + ln(1/eps) + i_max) / (c' I(E0; Es)), pe = eps / c', with P(E0=1) = mu/m.
BoundReport theorem1_bound(const GenerationParams& params, const BinaryChannel& scan, const VictimDistribution& dist,
                           double epsilon, double c_prime = 1.0);
BoundReport theorem1_bound(double edge_prior, const BinaryChannel& scan, const VictimDistribution& dist,
                           double epsilon, double c_prime = 1.0);

/// Stochastic-block bound: communities are queried by descending popularity and
/// the bound is the first query count at which the accumulated per-community
/// mutual information reaches psi = H(M) + ln(1/eps) + i_max.
BoundReport theorem2_bound(const GenerationParams& params, const BinaryChannel& scan, const VictimDistribution& dist,
                           double epsilon);

/// Compound-channel bound: weighted over the empirical (gamma, theta) joint.
BoundReport theorem3_bound(const GenerationParams& params, const NoiseModel& noise, const VictimDistribution& dist,
                           double epsilon, double c_prime = 1.0);
BoundReport theorem3_bound(double edge_prior, const NoiseModel& noise, const VictimDistribution& dist,
                           double epsilon, double c_prime = 1.0);

/// Mutual information between the response and the scanned bit when the true
/// bit is Bernoulli(edge_prior), Es ~ scan(.|E0), Y ~ query(.|E0).
double response_scan_information(double edge_prior, const BinaryChannel& scan, const BinaryChannel& query);

/// Recomputes (q_bar, pe) from the components of a report.
std::pair<double, double> recombine(const BoundReport& report);

struct TailBound {
  double threshold = 0.0;      // l = mu (1 + psi) / beta
  double kl_nats = 0.0;        // D_b(mu(1+psi)/m || mu/m)
  double exponent_bits = 0.0;  // n * D_b in bits
  double bound = 0.0;          // 2^(-exponent_bits), leading constant taken as 1
};

/// Membership-count tail bound P(C_i >= l) <= c 2^{-n D_b(...)}; psi in (0, m/mu - 1].
/// The upper endpoint is admitted as the degenerate case D_b(1 || mu/m).
TailBound prop2_tail_bound(const GenerationParams& params, double psi);

}  // namespace deanon::bounds
