#include "p2stc/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace p2stc {

void ChannelConfig::validate() const {
  if (n_tx == 0 || n_rx == 0) throw std::invalid_argument("channel: antenna counts must be positive");
  if (n_blocks == 0) throw std::invalid_argument("channel: L must be at least 1");
  if (!(es_per_antenna > 0.0)) throw std::invalid_argument("channel: Es must be positive");
  if (!(n0 >= 0.0)) throw std::invalid_argument("channel: N0 must be non-negative");
}

ChannelRealization sample_realization(const ChannelConfig& cfg, Rng& rng) {
  cfg.validate();
  ChannelRealization real(cfg.n_tx, cfg.n_rx, cfg.n_blocks);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  for (unsigned b = 0; b < cfg.n_blocks; ++b)
    for (unsigned i = 0; i < cfg.n_tx; ++i)
      for (unsigned s = 0; s < cfg.n_rx; ++s) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        real.at(b, i, s) = {re, im};
      }
  return real;
}

ReceivedFrame transmit(const SuperSymbolFrame& frame, const ChannelRealization& realization,
                       const ChannelConfig& cfg, Rng& rng) {
  cfg.validate();
  if (frame.n_antennas != cfg.n_tx || realization.n_tx() != cfg.n_tx || realization.n_rx() != cfg.n_rx ||
      realization.n_blocks() != cfg.n_blocks)
    throw std::invalid_argument("transmit: frame, realization and config dimensions disagree");
  const std::size_t f = frame.size();
  if (f == 0 || f % cfg.n_blocks != 0)
    throw std::invalid_argument("transmit: frame length " + std::to_string(f) + " not divisible by L=" +
                                std::to_string(cfg.n_blocks));

  ReceivedFrame rx;
  rx.n_rx = cfg.n_rx;
  rx.csi = realization;
  rx.es_per_antenna = cfg.es_per_antenna;
  rx.samples.resize(f * cfg.n_rx);

  const double amp = std::sqrt(cfg.es_per_antenna);
  const double sigma = std::sqrt(cfg.n0 / 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t block_len = f / cfg.n_blocks;
  for (std::size_t t = 0; t < f; ++t) {
    const cplx* alpha = realization.block(static_cast<unsigned>(t / block_len));
    for (unsigned s = 0; s < cfg.n_rx; ++s) {
      cplx sum{};
      for (unsigned i = 0; i < cfg.n_tx; ++i) sum += alpha[i * cfg.n_rx + s] * static_cast<double>(frame.at(t, i));
      // Noise draws are made even when n0 = 0 so the stream position does not depend on SNR.
      const double re = gauss(rng);
      const double im = gauss(rng);
      rx.samples[t * cfg.n_rx + s] = sum * amp + cplx(re * sigma, im * sigma);
    }
  }
  return rx;
}

EnergyPoint eb_n0_to_es(double eb_n0_db, Rational rate, unsigned n_tx) {
  if (rate.num <= 0 || rate.den <= 0 || rate.num > rate.den)
    throw std::invalid_argument("eb_n0_to_es: rate must be in (0, 1]");
  if (n_tx == 0) throw std::invalid_argument("eb_n0_to_es: zero antennas");
  const double gamma = std::pow(10.0, eb_n0_db / 10.0);
  return {1.0 / n_tx, 1.0 / (rate.value() * gamma)};
}

}  // namespace p2stc
