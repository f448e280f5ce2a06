#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "p2stc/common.hpp"
#include "p2stc/puncturing.hpp"
#include "p2stc/rng.hpp"

namespace p2stc {

using cplx = std::complex<double>;

/// Rayleigh block-fading N×M channel. A frame of F channel uses is split into
/// L equal blocks, each with its own fading matrix.
struct ChannelConfig {
  unsigned n_tx = 1;
  unsigned n_rx = 1;
  unsigned n_blocks = 1;
  double es_per_antenna = 1.0;
  double n0 = 1.0;  // complex noise variance; 0 means noiseless

  void validate() const;
};

/// Fading coefficients alpha(block, i, s): transmit antenna i to receive antenna s.
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(unsigned n_tx, unsigned n_rx, unsigned n_blocks)
      : n_tx_(n_tx), n_rx_(n_rx), n_blocks_(n_blocks), alpha_(std::size_t{n_tx} * n_rx * n_blocks) {}

  [[nodiscard]] unsigned n_tx() const { return n_tx_; }
  [[nodiscard]] unsigned n_rx() const { return n_rx_; }
  [[nodiscard]] unsigned n_blocks() const { return n_blocks_; }
  [[nodiscard]] cplx& at(unsigned block, unsigned i, unsigned s) { return alpha_[index(block, i, s)]; }
  [[nodiscard]] const cplx& at(unsigned block, unsigned i, unsigned s) const { return alpha_[index(block, i, s)]; }
  /// Contiguous N×M block matrix, row = transmit antenna.
  [[nodiscard]] const cplx* block(unsigned b) const { return alpha_.data() + std::size_t{b} * n_tx_ * n_rx_; }

 private:
  [[nodiscard]] std::size_t index(unsigned block, unsigned i, unsigned s) const {
    return (std::size_t{block} * n_tx_ + i) * n_rx_ + s;
  }
  unsigned n_tx_ = 0, n_rx_ = 0, n_blocks_ = 0;
  std::vector<cplx> alpha_;
};

struct ReceivedFrame {
  unsigned n_rx = 0;
  std::vector<cplx> samples;  // F × M, receive-antenna minor
  ChannelRealization csi;
  double es_per_antenna = 1.0;

  [[nodiscard]] std::size_t size() const { return n_rx ? samples.size() / n_rx : 0; }
  [[nodiscard]] const cplx* at(std::size_t t) const { return samples.data() + t * n_rx; }
  /// Fading block that channel use t falls in.
  [[nodiscard]] unsigned block_of(std::size_t t) const {
    return static_cast<unsigned>(t / (size() / csi.n_blocks()));
  }
};

/// Unit-variance circularly-symmetric complex Gaussian coefficients, i.i.d.
/// across blocks and antenna pairs.
ChannelRealization sample_realization(const ChannelConfig& cfg, Rng& rng);

/// r_s(t) = sum_i alpha_{i,s}(block(t)) c_i(t) sqrt(Es) + noise, noise variance n0.
ReceivedFrame transmit(const SuperSymbolFrame& frame, const ChannelRealization& realization,
                       const ChannelConfig& cfg, Rng& rng);

struct EnergyPoint {
  double es_per_antenna;
  double n0;
};

/// Unit total transmit energy per channel use (Es = 1/N per antenna) and
/// N0 = 1 / (R · 10^(Eb/N0 dB / 10)).
EnergyPoint eb_n0_to_es(double eb_n0_db, Rational rate, unsigned n_tx);

}  // namespace p2stc
