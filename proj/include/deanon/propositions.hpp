#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deanon/core.hpp"

namespace deanon::props {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Group-size moments averaged over sampled graphs.
struct MomentReport {
  Estimate mean_size;        // E[D]
  Estimate mean_square;      // E[D^2]
  Estimate mean_cross;       // E[D_i D_j], i != j
  std::size_t skipped_steps = 0;
};

/// Empirical P(C_i >= l) against the exponent curve (leading constant 1).
struct TailCell {
  double psi = 0.0;
  double threshold = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double exponent_bits = 0.0;
  double fraction_below = 0.0;  // bootstrap resamples with empirical <= bound
  bool conclusive = false;
  bool passed = false;
};

enum class EnvelopeCheck {
  Coverage,     // resampled ratio must fall inside on >= coverage of resamples
  Consistency,  // bootstrap interval must intersect the envelope
};

/// One partial-fingerprint pattern: P(R = s) / prod_k P_R(s_k) against its envelope.
struct FactorizationCell {
  std::size_t length = 0;
  std::string pattern;
  std::size_t weight = 0;
  double observed = 0.0;
  double product = 0.0;
  double ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double interval_low = 0.0;
  double interval_high = 0.0;
  double fraction_inside = 0.0;
  double expected_count = 0.0;
  EnvelopeCheck check = EnvelopeCheck::Coverage;
  bool conclusive = false;
  bool passed = false;
};

struct PropositionOptions {
  std::size_t samples = 10000;
  std::vector<double> psi_grid{0.5, 1.0, 2.0};
  std::vector<std::size_t> pattern_lengths{2, 3};
  std::size_t bootstrap = 200;
  double coverage = 0.99;
  /// Cells whose expected event count falls below this are reported inconclusive.
  double min_expected_count = 1000.0;
  std::uint64_t seed = 1;
};

struct PropositionReport {
  GenerationParams params;
  std::size_t samples = 0;
  MomentReport moments;
  std::vector<TailCell> tail;
  std::vector<FactorizationCell> factorization;
  /// Envelope family used for the factorization cells: "sandwich" (alpha-PA) or "sb".
  std::string envelope;

  /// No conclusive cell failed.
  bool consistent() const;
  std::size_t inconclusive_cells() const;
};

/// Monte Carlo check of the group-size moments, the membership-count tail and
/// the near-product structure of partial fingerprints.
PropositionReport verify_propositions(const GenerationParams& params, const PropositionOptions& options);

}  // namespace deanon::props
