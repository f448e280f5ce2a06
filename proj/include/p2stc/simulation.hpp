#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "p2stc/channel.hpp"
#include "p2stc/convcode.hpp"
#include "p2stc/decoder.hpp"
#include "p2stc/puncturing.hpp"

namespace p2stc {

/// One simulated configuration. Frames run encode → puncture → map →
/// channel → decode; each frame draws from streams keyed by (seed, point, frame).
struct SimScenario {
  std::string id = "scenario";
  std::string generators = "133,171";
  std::string matrix = "identity";  // catalog name, literal rows, or "identity"
  unsigned n_rx = 1;
  unsigned l_blocks = 1;
  std::size_t frame_info_bits = 0;  // 0: 130 for N=2, 120 for N=3, 128 otherwise
  std::vector<double> eb_n0_db;
  MetricConfig metric;
  std::uint64_t min_frame_errors = 100;
  std::uint64_t max_frames = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t batch_frames = 200;
  bool noiseless = false;
};

std::size_t default_frame_info_bits(unsigned n_tx);

/// Prepared, immutable transmit/receive chain for one scenario.
class Link {
 public:
  explicit Link(const SimScenario& scenario);

  [[nodiscard]] const SimScenario& scenario() const { return scenario_; }
  [[nodiscard]] const ConvCode& code() const { return code_; }
  [[nodiscard]] const Trellis& trellis() const { return trellis_; }
  [[nodiscard]] const PuncturingMatrix& matrix() const { return matrix_; }
  [[nodiscard]] const SymbolLayout& layout() const { return layout_; }
  [[nodiscard]] const MetricSchedule& schedule() const { return schedule_; }
  [[nodiscard]] Rational rate() const { return rate_; }
  [[nodiscard]] std::size_t info_bits() const { return info_bits_; }
  [[nodiscard]] unsigned n_tx() const { return code_.n_outputs(); }

  [[nodiscard]] ChannelConfig channel(double eb_n0_db) const;
  [[nodiscard]] ViterbiDecoder make_decoder() const { return ViterbiDecoder(trellis_, schedule_); }

  struct Frame {
    Bits info;
    ReceivedFrame rx;
  };
  /// Deterministic in (seed, point, frame) only.
  [[nodiscard]] Frame make_frame(double eb_n0_db, std::uint64_t point, std::uint64_t frame) const;

  /// Bit errors of one frame.
  unsigned run_frame(ViterbiDecoder& decoder, double eb_n0_db, std::uint64_t point, std::uint64_t frame) const;

 private:
  SimScenario scenario_;
  ConvCode code_;
  Trellis trellis_;
  PuncturingMatrix matrix_;
  SymbolLayout layout_;
  MetricSchedule schedule_;
  Rational rate_;
  std::size_t info_bits_;
};

struct PointCounts {
  std::uint64_t frames = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t frame_errors = 0;

  PointCounts& operator+=(const PointCounts& o) {
    frames += o.frames;
    bit_errors += o.bit_errors;
    frame_errors += o.frame_errors;
    return *this;
  }
};

struct Interval {
  double low;
  double high;
};

/// 95% Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct PointResult {
  double eb_n0_db = 0.0;
  PointCounts counts;
  std::size_t info_bits_per_frame = 0;
  bool stopped_on_errors = false;

  [[nodiscard]] double ber() const;
  [[nodiscard]] double fer() const;
  [[nodiscard]] Interval ber_ci() const;
};

struct SimResult {
  std::string id;
  std::string beta_label;  // "rule" or the fixed β
  std::uint64_t seed = 0;
  std::uint64_t scenario_hash = 0;
  double wall_seconds = 0.0;
  std::vector<PointResult> points;
};

/// Frames in batches of scenario.batch_frames until the cumulative frame
/// errors reach min_frame_errors or max_frames are spent. The stopping batch
/// is decided in batch order, so the result does not depend on worker count.
PointResult simulate_point(const Link& link, double eb_n0_db, std::uint64_t point_index);

SimResult run_scenario(const SimScenario& scenario);

/// Common-random-number run: every link sees the same info bits, fading and
/// noise for a given frame index. Returns bit errors per link per frame.
std::vector<std::vector<std::uint32_t>> run_paired(const std::vector<const Link*>& links, double eb_n0_db,
                                                   std::uint64_t point_index, std::uint64_t n_frames,
                                                   unsigned workers);

std::string beta_label(const MetricConfig& cfg);
std::uint64_t scenario_hash(const SimScenario& scenario);

}  // namespace p2stc
