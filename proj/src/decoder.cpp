#include "p2stc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2stc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// D[p] for every antenna pattern p of one super-symbol.
void distance_table(const SymbolObservation& obs, std::span<double> out) {
  const unsigned n = obs.n_tx;
  const std::size_t m = obs.r.size();
  const double amp = std::sqrt(obs.es);
  for (std::size_t p = 0; p < out.size(); ++p) {
    double d = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      cplx y{};
      for (unsigned j = 0; j < n; ++j) {
        const cplx a = obs.alpha[j * m + s];
        y += ((p >> j) & 1u) ? a : -a;
      }
      d += std::norm(obs.r[s] - y * amp);
    }
    out[p] = d;
  }
}

void check_bits(const SymbolObservation& obs, std::span<const std::int8_t> bits) {
  if (bits.size() != obs.n_tx) throw std::invalid_argument("hypothesis length differs from antenna count");
  if (obs.alpha.size() != std::size_t{obs.n_tx} * obs.r.size())
    throw std::invalid_argument("fading matrix shape differs from N×M");
}

}  // namespace

std::string to_string(MetricMode mode) {
  switch (mode) {
    case MetricMode::exact: return "exact";
    case MetricMode::split_min: return "split_min";
    case MetricMode::type1: return "type1";
    case MetricMode::type2: return "type2";
  }
  return "?";
}

MetricMode parse_metric_mode(std::string_view text) {
  if (text == "exact") return MetricMode::exact;
  if (text == "split_min") return MetricMode::split_min;
  if (text == "type1") return MetricMode::type1;
  if (text == "type2") return MetricMode::type2;
  throw std::invalid_argument("unknown metric '" + std::string(text) + "'");
}

void MetricConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
}

SymbolObservation observe(const ReceivedFrame& frame, std::size_t t) {
  const unsigned n = frame.csi.n_tx();
  const unsigned m = frame.n_rx;
  return SymbolObservation{std::span<const cplx>(frame.at(t), m),
                           std::span<const cplx>(frame.csi.block(frame.block_of(t)), std::size_t{n} * m), n,
                           frame.es_per_antenna};
}

double exact_increment(const SymbolObservation& obs, std::span<const std::int8_t> bits) {
  check_bits(obs, bits);
  const std::size_t m = obs.r.size();
  const double amp = std::sqrt(obs.es);
  double d = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    cplx y{};
    for (unsigned i = 0; i < obs.n_tx; ++i) {
      if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("exact_increment: every bit must be known");
      y += obs.alpha[i * m + s] * static_cast<double>(2 * bits[i] - 1);
    }
    d += std::norm(obs.r[s] - y * amp);
  }
  return d;
}

double left_increment(const SymbolObservation& obs, std::span<const std::int8_t> bits, double weight) {
  check_bits(obs, bits);
  std::array<std::int8_t, kMaxOutputs> trial{};
  std::array<unsigned, kMaxOutputs> unknown{};
  unsigned n_unknown = 0;
  for (unsigned i = 0; i < obs.n_tx; ++i) {
    trial[i] = bits[i];
    if (bits[i] == kUnknownBit) unknown[n_unknown++] = i;
  }
  double best = kInf;
  for (unsigned a = 0; a < (1u << n_unknown); ++a) {
    for (unsigned k = 0; k < n_unknown; ++k) trial[unknown[k]] = static_cast<std::int8_t>((a >> k) & 1u);
    best = std::min(best, exact_increment(obs, std::span<const std::int8_t>(trial.data(), obs.n_tx)));
  }
  return weight * best;
}

double right_increment(const SymbolObservation& obs, std::span<const std::int8_t> bits, double weight) {
  check_bits(obs, bits);
  for (auto b : bits)
    if (b == kUnknownBit) throw std::logic_error("right_increment: survivor bits not resolved");
  return weight * exact_increment(obs, bits);
}

double rule_of_thumb_beta(unsigned n_left, unsigned n_right, unsigned n_total) {
  if (n_total == 0) throw std::invalid_argument("rule_of_thumb_beta: n_tot must be positive");
  if (n_right > n_total || n_left > n_total) throw std::invalid_argument("rule_of_thumb_beta: counts exceed n_tot");
  return static_cast<double>(n_right) / static_cast<double>(n_total);
}

Type2Weights compute_type2_weights(double beta, unsigned delta) {
  if (delta < 1) throw std::invalid_argument("compute_type2_weights: delta must be at least 1");
  const double d = static_cast<double>(delta);
  const double denom = d + beta * (1.0 - d);
  if (!(std::abs(denom) > 1e-12)) throw std::invalid_argument("compute_type2_weights: vanishing denominator");
  return {(1.0 - beta) * d / denom, beta * d / denom};
}

MetricSchedule build_schedule(const SymbolLayout& layout, const MetricConfig& cfg) {
  cfg.validate();
  const unsigned n = layout.n_antennas;
  if (n == 0 || n > kMaxOutputs) throw std::invalid_argument("build_schedule: unsupported antenna count");

  MetricSchedule sched;
  sched.mode = cfg.mode;
  sched.n_antennas = n;
  sched.n_symbols = layout.n_symbols();
  sched.transitions.resize(layout.n_transitions);

  auto make = [&](std::size_t s, Role role, double weight, std::uint32_t own, std::uint32_t partner) {
    Contribution c;
    c.symbol = static_cast<std::uint32_t>(s);
    c.role = role;
    c.weight = weight;
    c.partner = partner;
    c.own_output.fill(-1);
    c.partner_output.fill(-1);
    for (unsigned j = 0; j < n; ++j) {
      const auto& src = layout.source(s, j);
      if (src.transition == own) {
        c.own_output[j] = static_cast<std::int8_t>(src.output);
      } else {
        c.partner_output[j] = static_cast<std::int8_t>(src.output);
      }
    }
    sched.transitions[own].push_back(c);
  };

  auto symbol_beta = [&](std::size_t s) {
    if (cfg.beta_rule == BetaRule::fixed) return cfg.beta;
    const auto left = layout.first_transition(s);
    const auto right = layout.last_transition(s);
    unsigned nl = 0, nr = 0;
    for (unsigned j = 0; j < n; ++j) {
      nl += layout.source(s, j).transition == left;
      nr += layout.source(s, j).transition == right;
    }
    return rule_of_thumb_beta(nl, nr, n);
  };

  std::vector<bool> in_event(layout.n_symbols(), false);
  if (cfg.mode == MetricMode::type2) {
    for (const auto& ev : spanning_events(layout)) {
      double beta = 0.0;
      for (unsigned k = 0; k < ev.delta; ++k) beta += symbol_beta(ev.first_symbol + k);
      beta /= ev.delta;
      const auto w = compute_type2_weights(beta, ev.delta);
      for (unsigned k = 0; k < ev.delta; ++k) {
        const auto s = ev.first_symbol + k;
        in_event[s] = true;
        make(s, Role::left, w.omega_a, layout.first_transition(s), layout.last_transition(s));
      }
      const auto last = ev.first_symbol + ev.delta - 1;
      make(last, Role::right, w.omega_b, layout.last_transition(last), layout.first_transition(last));
    }
  }

  for (std::size_t s = 0; s < layout.n_symbols(); ++s) {
    const auto left = layout.first_transition(s);
    const auto right = layout.last_transition(s);
    if (left == right) {
      make(s, Role::full, 1.0, left, left);
      continue;
    }
    switch (cfg.mode) {
      case MetricMode::exact:
        throw std::invalid_argument("exact metric requires a puncturing pattern without spanning super-symbols");
      case MetricMode::split_min:
      case MetricMode::type1: {
        const double beta = symbol_beta(s);
        make(s, Role::left, 1.0 - beta, left, right);
        make(s, cfg.mode == MetricMode::type1 ? Role::right : Role::right_min, beta, right, left);
        break;
      }
      case MetricMode::type2:
        if (!in_event[s]) throw std::logic_error("spanning symbol outside every event");
        break;
    }
  }
  return sched;
}

std::vector<double> symbol_weights(const MetricSchedule& schedule) {
  std::vector<double> w(schedule.n_symbols, 0.0);
  for (const auto& terms : schedule.transitions)
    for (const auto& c : terms) w[c.symbol] += c.weight;
  return w;
}

double path_metric(const MetricSchedule& schedule, const SymbolLayout& layout, const ConvCode& code,
                   const ReceivedFrame& frame, const Bits& info_bits) {
  const Bits coded = encode(code, info_bits, true);
  const unsigned n_out = code.n_outputs();
  if (coded.size() != schedule.n_transitions() * n_out)
    throw std::invalid_argument("path_metric: path length differs from schedule");
  auto bit_of = [&](std::uint32_t transition, std::int8_t output) {
    return static_cast<std::int8_t>(coded[std::size_t{transition} * n_out + static_cast<unsigned>(output)]);
  };
  double total = 0.0;
  std::vector<std::int8_t> hyp(layout.n_antennas);
  for (std::size_t t = 0; t < schedule.n_transitions(); ++t) {
    for (const auto& c : schedule.transitions[t]) {
      const auto obs = observe(frame, c.symbol);
      for (unsigned j = 0; j < layout.n_antennas; ++j) {
        if (c.own_output[j] >= 0) {
          hyp[j] = bit_of(static_cast<std::uint32_t>(t), c.own_output[j]);
        } else if (c.role == Role::right) {
          hyp[j] = bit_of(c.partner, c.partner_output[j]);
        } else {
          hyp[j] = kUnknownBit;
        }
      }
      switch (c.role) {
        case Role::full: total += c.weight * exact_increment(obs, hyp); break;
        case Role::left:
        case Role::right_min: total += left_increment(obs, hyp, c.weight); break;
        case Role::right: total += right_increment(obs, hyp, c.weight); break;
      }
    }
  }
  return total;
}

ViterbiDecoder::ViterbiDecoder(const Trellis& trellis, const MetricSchedule& schedule, bool terminated)
    : trellis_(trellis),
      terminated_(terminated),
      n_ant_(schedule.n_antennas),
      n_labels_(std::size_t{1} << trellis.n_outputs()),
      n_patterns_(std::size_t{1} << schedule.n_antennas),
      terms_(schedule.n_transitions()) {
  if (schedule.n_antennas != trellis.n_outputs())
    throw std::invalid_argument("decoder: antenna count differs from mother-code outputs");
  if (terminated_ && schedule.n_transitions() <= trellis.memory())
    throw std::invalid_argument("decoder: frame shorter than the termination tail");

  std::size_t max_right = 0;
  for (std::size_t t = 0; t < schedule.n_transitions(); ++t) {
    std::size_t rights = 0;
    for (const auto& c : schedule.transitions[t]) {
      PreparedTerm pt;
      pt.role = c.role;
      pt.weight = c.weight;
      pt.symbol = c.symbol;
      pt.depth = 0;
      if (c.role == Role::right) {
        if (c.partner >= t) throw std::logic_error("decoder: survivor term scheduled before its left transition");
        pt.depth = static_cast<std::uint32_t>(t - c.partner);
        ++rights;
      }
      pt.own_pattern.assign(n_labels_, 0);
      pt.partner_pattern.assign(n_labels_, 0);
      pt.free_mask = 0;
      for (unsigned j = 0; j < n_ant_; ++j) {
        if (c.partner_output[j] >= 0) pt.free_mask |= static_cast<std::uint16_t>(1u << j);
        for (std::size_t l = 0; l < n_labels_; ++l) {
          if (c.own_output[j] >= 0 && ((l >> c.own_output[j]) & 1u))
            pt.own_pattern[l] |= static_cast<std::uint16_t>(1u << j);
          if (c.partner_output[j] >= 0 && ((l >> c.partner_output[j]) & 1u))
            pt.partner_pattern[l] |= static_cast<std::uint16_t>(1u << j);
        }
      }
      terms_[t].push_back(std::move(pt));
    }
    max_right = std::max(max_right, rights);
  }

  dist_.resize(schedule.n_symbols * n_patterns_);
  base_.resize(n_labels_);
  right_.resize(max_right * n_labels_ * n_labels_);
  partner_label_.resize(max_right * trellis.num_states());
  pm_.resize(trellis.num_states());
  next_pm_.resize(trellis.num_states());
  decisions_.resize(schedule.n_transitions() * trellis.num_states());
}

void ViterbiDecoder::fill_distance_tables(const ReceivedFrame& frame) {
  const std::size_t n_sym = dist_.size() / n_patterns_;
  if (frame.size() != n_sym)
    throw std::invalid_argument("decoder: frame has " + std::to_string(frame.size()) + " symbols, schedule expects " +
                                std::to_string(n_sym));
  if (frame.csi.n_tx() != n_ant_) throw std::invalid_argument("decoder: CSI antenna count mismatch");
  for (std::size_t t = 0; t < n_sym; ++t)
    distance_table(observe(frame, t), std::span<double>(dist_.data() + t * n_patterns_, n_patterns_));
}

DecodeResult ViterbiDecoder::decode(const ReceivedFrame& frame) {
  fill_distance_tables(frame);
  const std::size_t ns = trellis_.num_states();
  const std::size_t n_trans = terms_.size();

  std::fill(pm_.begin(), pm_.end(), kInf);
  pm_[0] = 0.0;

  for (std::size_t t = 0; t < n_trans; ++t) {
    std::fill(base_.begin(), base_.end(), 0.0);
    std::size_t n_right = 0;
    std::array<std::uint32_t, 8> right_depth{};
    for (const auto& term : terms_[t]) {
      const double* d = dist_.data() + std::size_t{term.symbol} * n_patterns_;
      switch (term.role) {
        case Role::full:
          for (std::size_t l = 0; l < n_labels_; ++l) base_[l] += term.weight * d[term.own_pattern[l]];
          break;
        case Role::left:
        case Role::right_min:
          for (std::size_t l = 0; l < n_labels_; ++l) {
            const auto own = term.own_pattern[l];
            double best = d[own];
            // Enumerate every subset of the free antennas.
            for (std::uint16_t q = term.free_mask; q; q = static_cast<std::uint16_t>((q - 1) & term.free_mask))
              best = std::min(best, d[own | q]);
            base_[l] += term.weight * best;
          }
          break;
        case Role::right: {
          if (n_right == right_depth.size()) throw std::logic_error("decoder: too many survivor terms per transition");
          double* tab = right_.data() + n_right * n_labels_ * n_labels_;
          for (std::size_t p = 0; p < n_labels_; ++p)
            for (std::size_t l = 0; l < n_labels_; ++l)
              tab[p * n_labels_ + l] = term.weight * d[term.own_pattern[l] | term.partner_pattern[p]];
          right_depth[n_right++] = term.depth;
          break;
        }
      }
    }

    // Survivor lookup: label of the partner transition on each departing state's survivor.
    for (std::size_t k = 0; k < n_right; ++k) {
      std::uint32_t* out = partner_label_.data() + k * ns;
      const auto depth = right_depth[k];
      for (std::uint32_t s = 0; s < ns; ++s) {
        if (pm_[s] == kInf) continue;
        std::uint32_t st = s;
        for (std::uint32_t back = 1; back < depth; ++back) st = decisions_[(t - back) * ns + st] >> 1;
        const auto dec = decisions_[(t - depth) * ns + st];
        out[s] = trellis_.branch(dec >> 1, dec & 1u).label;
      }
    }

    std::uint32_t* dec_row = decisions_.data() + t * ns;
    for (std::uint32_t s = 0; s < ns; ++s) {
      double best = kInf;
      std::uint32_t best_dec = 0;
      for (unsigned j = 0; j < 2; ++j) {
        const auto& in = trellis_.incoming(s, j);
        const double prev = pm_[in.prev];
        if (prev == kInf) continue;
        const auto label = trellis_.branch(in.prev, in.input).label;
        double bm = base_[label];
        for (std::size_t k = 0; k < n_right; ++k)
          bm += right_[(k * n_labels_ + partner_label_[k * ns + in.prev]) * n_labels_ + label];
        const double cand = prev + bm;
        if (cand < best) {
          best = cand;
          best_dec = (in.prev << 1) | in.input;
        }
      }
      next_pm_[s] = best;
      dec_row[s] = best_dec;
    }
    pm_.swap(next_pm_);
  }

  std::uint32_t state = 0;
  if (!terminated_) {
    for (std::uint32_t s = 1; s < ns; ++s)
      if (pm_[s] < pm_[state]) state = s;
  }
  DecodeResult result;
  result.metric = pm_[state];
  if (!std::isfinite(result.metric) || result.metric > 1e300)
    throw std::runtime_error("decoder: path metric overflow or unreachable final state");

  Bits inputs(n_trans);
  for (std::size_t t = n_trans; t-- > 0;) {
    const auto dec = decisions_[t * ns + state];
    inputs[t] = static_cast<std::uint8_t>(dec & 1u);
    state = dec >> 1;
  }
  inputs.resize(terminated_ ? n_trans - trellis_.memory() : n_trans);
  result.info_bits = std::move(inputs);
  return result;
}

Bits ml_joint_decode(const ReceivedFrame& frame, const Trellis& trellis, const SymbolLayout& layout,
                     std::size_t n_info, unsigned max_segment_transitions) {
  const std::size_t n_trans = layout.n_transitions;
  if (n_info + trellis.memory() != n_trans)
    throw std::invalid_argument("ml_joint_decode: info length inconsistent with terminated frame");
  if (frame.size() != layout.n_symbols()) throw std::invalid_argument("ml_joint_decode: frame/layout mismatch");
  const unsigned n = layout.n_antennas;
  const std::size_t n_pat = std::size_t{1} << n;

  std::vector<bool> joined(n_trans + 1, false);
  for (std::size_t s = 0; s < layout.n_symbols(); ++s)
    for (auto u = layout.first_transition(s) + 1; u <= layout.last_transition(s); ++u) joined[u] = true;

  struct Segment {
    std::size_t begin, end;
    std::vector<std::size_t> symbols;
  };
  std::vector<Segment> segments;
  for (std::size_t t = 0; t < n_trans; ++t) {
    if (t == 0 || !joined[t]) segments.push_back(Segment{t, t + 1, {}});
    else segments.back().end = t + 1;
  }
  std::vector<std::size_t> seg_of(n_trans);
  for (std::size_t g = 0; g < segments.size(); ++g) {
    if (segments[g].end - segments[g].begin > max_segment_transitions)
      throw std::invalid_argument("ml_joint_decode: segment of " +
                                  std::to_string(segments[g].end - segments[g].begin) + " transitions exceeds limit");
    for (auto t = segments[g].begin; t < segments[g].end; ++t) seg_of[t] = g;
  }
  for (std::size_t s = 0; s < layout.n_symbols(); ++s) segments[seg_of[layout.first_transition(s)]].symbols.push_back(s);

  std::vector<double> dist(layout.n_symbols() * n_pat);
  std::vector<std::int8_t> hyp(n);
  for (std::size_t s = 0; s < layout.n_symbols(); ++s) {
    const auto obs = observe(frame, s);
    for (std::size_t p = 0; p < n_pat; ++p) {
      for (unsigned j = 0; j < n; ++j) hyp[j] = static_cast<std::int8_t>((p >> j) & 1u);
      dist[s * n_pat + p] = exact_increment(obs, hyp);
    }
  }

  const std::size_t ns = trellis.num_states();
  std::vector<double> pm(ns, kInf), next(ns, kInf);
  pm[0] = 0.0;
  struct Back {
    std::uint32_t prev;
    std::uint32_t inputs;
  };
  std::vector<std::vector<Back>> back(segments.size(), std::vector<Back>(ns));
  std::vector<std::uint32_t> labels(max_segment_transitions);

  for (std::size_t g = 0; g < segments.size(); ++g) {
    const auto& seg = segments[g];
    const auto len = static_cast<unsigned>(seg.end - seg.begin);
    std::fill(next.begin(), next.end(), kInf);
    for (std::uint32_t s0 = 0; s0 < ns; ++s0) {
      if (pm[s0] == kInf) continue;
      for (std::uint32_t u = 0; u < (1u << len); ++u) {
        std::uint32_t st = s0;
        for (unsigned k = 0; k < len; ++k) {
          const auto& br = trellis.branch(st, (u >> k) & 1u);
          labels[k] = br.label;
          st = br.next;
        }
        double metric = pm[s0];
        for (auto sym : seg.symbols) {
          std::size_t p = 0;
          for (unsigned j = 0; j < n; ++j) {
            const auto& src = layout.source(sym, j);
            p |= std::size_t{(labels[src.transition - seg.begin] >> src.output) & 1u} << j;
          }
          metric += dist[sym * n_pat + p];
        }
        if (metric < next[st]) {
          next[st] = metric;
          back[g][st] = Back{s0, u};
        }
      }
    }
    pm.swap(next);
  }
  if (pm[0] == kInf) throw std::runtime_error("ml_joint_decode: zero state unreachable");

  Bits inputs(n_trans);
  std::uint32_t state = 0;
  for (std::size_t g = segments.size(); g-- > 0;) {
    const auto& b = back[g][state];
    for (auto t = segments[g].begin; t < segments[g].end; ++t)
      inputs[t] = static_cast<std::uint8_t>((b.inputs >> (t - segments[g].begin)) & 1u);
    state = b.prev;
  }
  inputs.resize(n_info);
  return inputs;
}

ExhaustiveMl::ExhaustiveMl(const ConvCode& code, const PuncturingMatrix& matrix, std::size_t n_info,
                           std::size_t max_info_bits)
    : n_info_(n_info), n_ant_(code.n_outputs()), n_symbols_(0) {
  if (n_info == 0 || n_info > max_info_bits || n_info > 24)
    throw std::invalid_argument("exhaustive ML: " + std::to_string(n_info) + " info bits exceeds the limit");
  if (matrix.rows() != code.n_outputs()) throw std::invalid_argument("exhaustive ML: matrix rows differ from N");
  const std::size_t count = std::size_t{1} << n_info;
  Bits info(n_info);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < n_info; ++i) info[i] = static_cast<std::uint8_t>((c >> i) & 1u);
    const auto frame = map_to_supersymbols(apply_puncture(encode(code, info, true), matrix), n_ant_);
    if (c == 0) {
      n_symbols_ = frame.size();
      patterns_.reserve(count * n_symbols_);
    }
    for (std::size_t t = 0; t < frame.size(); ++t) {
      std::uint16_t p = 0;
      for (unsigned j = 0; j < n_ant_; ++j) p |= static_cast<std::uint16_t>((frame.at(t, j) > 0 ? 1u : 0u) << j);
      patterns_.push_back(p);
    }
  }
}

Bits ExhaustiveMl::decode(const ReceivedFrame& frame) const {
  if (frame.size() != n_symbols_) throw std::invalid_argument("exhaustive ML: frame length mismatch");
  const std::size_t n_pat = std::size_t{1} << n_ant_;
  std::vector<double> dist(n_symbols_ * n_pat);
  std::vector<std::int8_t> hyp(n_ant_);
  for (std::size_t t = 0; t < n_symbols_; ++t) {
    const auto obs = observe(frame, t);
    for (std::size_t p = 0; p < n_pat; ++p) {
      for (unsigned j = 0; j < n_ant_; ++j) hyp[j] = static_cast<std::int8_t>((p >> j) & 1u);
      dist[t * n_pat + p] = exact_increment(obs, hyp);
    }
  }
  const std::size_t count = std::size_t{1} << n_info_;
  std::size_t best_c = 0;
  double best = kInf;
  for (std::size_t c = 0; c < count; ++c) {
    const std::uint16_t* pat = patterns_.data() + c * n_symbols_;
    double m = 0.0;
    for (std::size_t t = 0; t < n_symbols_; ++t) m += dist[t * n_pat + pat[t]];
    if (m < best) {
      best = m;
      best_c = c;
    }
  }
  Bits out(n_info_);
  for (std::size_t i = 0; i < n_info_; ++i) out[i] = static_cast<std::uint8_t>((best_c >> i) & 1u);
  return out;
}

}  // namespace p2stc
