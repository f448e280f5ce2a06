#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "p2stc/channel.hpp"
#include "p2stc/convcode.hpp"
#include "p2stc/puncturing.hpp"

namespace p2stc {

enum class MetricMode { exact, split_min, type1, type2 };
enum class BetaRule { fixed, rule_of_thumb };

std::string to_string(MetricMode mode);
MetricMode parse_metric_mode(std::string_view text);

struct MetricConfig {
  MetricMode mode = MetricMode::type1;
  double beta = 0.5;
  BetaRule beta_rule = BetaRule::rule_of_thumb;

  void validate() const;
};

/// One received super-symbol together with the CSI it was sent through.
struct SymbolObservation {
  std::span<const cplx> r;      // M samples
  std::span<const cplx> alpha;  // N×M, row = transmit antenna
  unsigned n_tx = 0;
  double es = 1.0;
};

SymbolObservation observe(const ReceivedFrame& frame, std::size_t t);

/// Per-antenna hypothesis entry for a bit that is not fixed by the branch.
inline constexpr std::int8_t kUnknownBit = -1;

/// Squared Euclidean distance between r and the noiseless image of `bits`.
double exact_increment(const SymbolObservation& obs, std::span<const std::int8_t> bits);

/// weight · min over every assignment of the kUnknownBit entries.
double left_increment(const SymbolObservation& obs, std::span<const std::int8_t> bits, double weight);

/// weight · exact distance with the earlier transition's bits taken from the
/// survivor. An unresolved (kUnknownBit) entry is a schedule-ordering bug and throws.
double right_increment(const SymbolObservation& obs, std::span<const std::int8_t> bits, double weight);

/// β = n_R / n_tot, so that 1 − β = n_L / n_tot.
double rule_of_thumb_beta(unsigned n_left, unsigned n_right, unsigned n_total);

struct Type2Weights {
  double omega_a;
  double omega_b;
};

/// ω_a = (1−β)δ / (δ+β(1−δ)), ω_b = βδ / (δ+β(1−δ)); δ·ω_a + ω_b = δ.
Type2Weights compute_type2_weights(double beta, unsigned delta);

enum class Role : std::uint8_t {
  full,       // every antenna carries a bit of this transition
  left,       // this is the earlier transition; the later one's bits are minimized out
  right,      // this is the later transition; the earlier one's bits come from the survivor
  right_min,  // later transition, earlier bits minimized out (split-min)
};

struct Contribution {
  std::uint32_t symbol = 0;
  Role role = Role::full;
  double weight = 1.0;
  std::uint32_t partner = 0;  // the other transition of a spanning symbol
  /// Per antenna: output index of this transition's bit carried there, or -1.
  std::array<std::int8_t, kMaxOutputs> own_output{};
  /// Per antenna: output index of the partner transition's bit, or -1.
  std::array<std::int8_t, kMaxOutputs> partner_output{};
};

/// Branch-metric recipe: for each trellis transition, the super-symbol terms
/// that make up its increment.
struct MetricSchedule {
  MetricMode mode = MetricMode::exact;
  unsigned n_antennas = 0;
  std::size_t n_symbols = 0;
  std::vector<std::vector<Contribution>> transitions;

  [[nodiscard]] std::size_t n_transitions() const { return transitions.size(); }
};

MetricSchedule build_schedule(const SymbolLayout& layout, const MetricConfig& cfg);

/// Total weight each super-symbol receives. 1 per symbol for exact/split-min/type1;
/// for type2 the symbols of an event sum to δ.
std::vector<double> symbol_weights(const MetricSchedule& schedule);

/// Accumulated scheduled metric along a given input path, computed with the
/// scalar increment functions. Survivor-dependent terms use the path's own bits.
double path_metric(const MetricSchedule& schedule, const SymbolLayout& layout, const ConvCode& code,
                   const ReceivedFrame& frame, const Bits& info_bits);

struct DecodeResult {
  Bits info_bits;
  double metric = 0.0;
};

/// Viterbi decoder over the mother-code trellis driven by a MetricSchedule.
/// Reusable across frames; not thread-safe (one instance per worker).
class ViterbiDecoder {
 public:
  ViterbiDecoder(const Trellis& trellis, const MetricSchedule& schedule, bool terminated = true);

  DecodeResult decode(const ReceivedFrame& frame);

 private:
  struct PreparedTerm {
    Role role;
    double weight;
    std::uint32_t symbol;
    std::uint32_t depth;                    // right: transitions back to the partner
    std::vector<std::uint16_t> own_pattern;     // label → antenna bits
    std::vector<std::uint16_t> partner_pattern; // partner label → antenna bits
    std::uint16_t free_mask;                    // antennas carrying partner bits
  };

  void fill_distance_tables(const ReceivedFrame& frame);

  Trellis trellis_;
  bool terminated_;
  unsigned n_ant_;
  std::size_t n_labels_;
  std::size_t n_patterns_;
  std::vector<std::vector<PreparedTerm>> terms_;

  std::vector<double> dist_;       // n_symbols × 2^N
  std::vector<double> base_;       // 2^N
  std::vector<double> right_;      // per right term: 2^N × 2^N
  std::vector<std::uint32_t> partner_label_;  // per right term × states
  std::vector<double> pm_, next_pm_;
  std::vector<std::uint32_t> decisions_;  // transitions × states: prev << 1 | input
};

/// Exact ML via a segment trellis: transitions tied together by spanning
/// symbols are merged into one segment, so every symbol is scored exactly.
/// Throws if a segment would need more than max_segment_transitions.
Bits ml_joint_decode(const ReceivedFrame& frame, const Trellis& trellis, const SymbolLayout& layout,
                     std::size_t n_info, unsigned max_segment_transitions = 8);

/// Brute-force ML over all 2^k information words; codewords are precomputed
/// with encode()/apply_puncture() and scored with exact_increment().
class ExhaustiveMl {
 public:
  ExhaustiveMl(const ConvCode& code, const PuncturingMatrix& matrix, std::size_t n_info,
               std::size_t max_info_bits = 20);

  [[nodiscard]] Bits decode(const ReceivedFrame& frame) const;
  [[nodiscard]] std::size_t n_symbols() const { return n_symbols_; }

 private:
  std::size_t n_info_;
  unsigned n_ant_;
  std::size_t n_symbols_;
  std::vector<std::uint16_t> patterns_;  // 2^k × n_symbols antenna patterns
};

}  // namespace p2stc
