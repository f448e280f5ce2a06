#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "p2stc/common.hpp"
#include "p2stc/puncturing.hpp"
#include "p2stc/simulation.hpp"

namespace p2stc {

/// Singleton-type bound on block fading: 1 + floor(L·N·(1 − R)), exact.
unsigned diversity_bound(unsigned l_blocks, unsigned n_tx, Rational rate);

struct CurvePoint {
  double eb_n0_db = 0.0;
  double fer = 0.0;
  std::uint64_t frames = 0;  // 0 for synthetic points: no resolution floor
};

struct DiversityEstimate {
  double order = 0.0;
  std::vector<CurvePoint> fit_points;
  double residual = 0.0;  // RMS residual of the log10 fit
  bool flat = false;      // |order| < 0.1
};

/// Least-squares slope of log10(FER) against Eb/N0 in dB; order = −10·slope.
/// Points are used when fer_low < FER < fer_high and FER > 10/frames.
DiversityEstimate estimate_diversity(const std::vector<CurvePoint>& curve, double fer_high = 0.1,
                                     double fer_low = 0.0);

std::vector<CurvePoint> fer_curve(const SimResult& result);

enum class ChannelKind { awgn, rayleigh };

/// Uncoded BPSK: Q(sqrt(2γ)) on AWGN, (1 − sqrt(γ/(1+γ)))/2 on Rayleigh.
double analytic_ber(ChannelKind kind, double eb_n0_db);

/// Eb/N0 where a BER curve crosses `target`, by log-linear interpolation
/// between the first bracketing pair of points. Throws if never bracketed.
double snr_at_ber(const std::vector<std::pair<double, double>>& db_ber, double target);

/// Per-frame paired comparison of two error-count vectors over the same frames.
struct PairedComparison {
  double mean_a = 0.0;  // BER
  double mean_b = 0.0;
  double diff = 0.0;     // mean_a − mean_b
  double std_err = 0.0;
  [[nodiscard]] double ci_low() const { return diff - 1.959963984540054 * std_err; }
  [[nodiscard]] double ci_high() const { return diff + 1.959963984540054 * std_err; }
  [[nodiscard]] bool a_better() const { return ci_high() < 0.0; }
  [[nodiscard]] bool b_better() const { return ci_low() > 0.0; }
};

PairedComparison paired_compare(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                std::size_t bits_per_frame);

struct BetaSweepRow {
  double beta = 0.0;
  double eb_n0_db = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t frame_errors = 0;
  double ber = 0.0;
  Interval ci{0.0, 1.0};
  std::vector<std::uint32_t> per_frame;  // bit errors per frame, for paired tests
};

/// BER per β at every Eb/N0 of the scenario, fixed-β metric, common random
/// numbers across β.
std::vector<BetaSweepRow> sweep_beta(const SimScenario& scenario, const std::vector<double>& beta_grid,
                                     std::uint64_t frames_per_point);

/// Row with the lowest BER (first on ties) among rows at `eb_n0_db`.
const BetaSweepRow& argmin_beta(const std::vector<BetaSweepRow>& rows, double eb_n0_db);

/// A basic pattern: n_zeros zeros placed in a block of `width` consecutive
/// columns, with zeros in its first and last column, embedded into an
/// all-ones matrix of the given period at column `offset` (0-based).
struct PatternCandidate {
  std::vector<std::string> block;  // n_tx rows × width
  unsigned width = 0;
  unsigned delta = 0;
  PuncturingMatrix embedded;
};

PuncturingMatrix embed_pattern(const std::vector<std::string>& block, unsigned period, unsigned offset);

std::vector<PatternCandidate> enumerate_basic_patterns(unsigned n_tx, unsigned n_zeros, unsigned max_width,
                                                       unsigned period = 10, unsigned offset = 1);

struct PatternScore {
  PatternCandidate pattern;
  double best_beta = 0.0;
  double ber = 0.0;
  Interval ci{0.0, 1.0};
  std::uint64_t frames = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t frame_errors = 0;
};

/// Each feasible placement evaluated at its own best β from `beta_grid` at the
/// scenario's first Eb/N0, then ranked by BER (ascending).
std::vector<PatternScore> search_patterns(unsigned n_tx, unsigned n_zeros, unsigned max_width,
                                          const SimScenario& scenario, const std::vector<double>& beta_grid,
                                          std::uint64_t frames, unsigned period = 10);

/// Same pattern at two offsets, paired frames. Reported, not asserted.
struct PositionCheck {
  PairedComparison comparison;
  bool within_3_sigma = false;
};

PositionCheck position_invariance(const std::vector<std::string>& block, unsigned offset_a, unsigned offset_b,
                                  const SimScenario& scenario, std::uint64_t frames, unsigned period = 10);

}  // namespace p2stc
