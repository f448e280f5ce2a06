#include "p2stc/convcode.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace p2stc {

ConvCode::ConvCode(unsigned constraint_length, std::vector<std::uint32_t> generators)
    : k_(constraint_length), generators_(std::move(generators)) {
  if (k_ < 1 || k_ > kMaxConstraintLength)
    throw std::invalid_argument("constraint length must be in [1, 16], got " + std::to_string(k_));
  if (generators_.empty() || generators_.size() > kMaxOutputs)
    throw std::invalid_argument("number of generators must be in [1, 8]");
  const std::uint32_t limit = 1u << k_;
  for (auto g : generators_) {
    if (g == 0) throw std::invalid_argument("generator with no taps");
    if (g >= limit) throw std::invalid_argument("generator wider than the constraint length");
  }
  if (generators_.size() > 1 &&
      std::all_of(generators_.begin(), generators_.end(), [&](auto g) { return g == generators_.front(); }))
    throw std::invalid_argument("all generators identical");
}

ConvCode ConvCode::from_octal(std::string_view csv, unsigned constraint_length) {
  std::vector<std::uint32_t> gens;
  std::string token;
  std::istringstream in{std::string(csv)};
  while (std::getline(in, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) throw std::invalid_argument("empty generator in '" + std::string(csv) + "'");
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(token, &pos, 8);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != token.size()) throw std::invalid_argument("invalid octal generator '" + token + "'");
    gens.push_back(static_cast<std::uint32_t>(v));
  }
  if (constraint_length == 0) {
    for (auto g : gens) constraint_length = std::max<unsigned>(constraint_length, std::bit_width(g));
  }
  return ConvCode(constraint_length, std::move(gens));
}

std::string ConvCode::octal() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < generators_.size(); ++i) os << (i ? "," : "") << std::oct << generators_[i];
  return os.str();
}

std::uint32_t ConvCode::output(std::uint32_t state, unsigned bit) const {
  const std::uint32_t reg = (static_cast<std::uint32_t>(bit & 1u) << (k_ - 1)) | state;
  std::uint32_t label = 0;
  for (std::size_t i = 0; i < generators_.size(); ++i)
    label |= static_cast<std::uint32_t>(std::popcount(reg & generators_[i]) & 1) << i;
  return label;
}

std::uint32_t ConvCode::next_state(std::uint32_t state, unsigned bit) const {
  const std::uint32_t reg = (static_cast<std::uint32_t>(bit & 1u) << (k_ - 1)) | state;
  return reg >> 1;
}

Bits encode(const ConvCode& code, const Bits& info_bits, bool terminate) {
  if (info_bits.empty()) throw std::invalid_argument("encode: empty input");
  const std::size_t n = code.n_outputs();
  const std::size_t len = info_bits.size() + (terminate ? code.memory() : 0);
  Bits out;
  out.reserve(len * n);
  std::uint32_t state = 0;
  for (std::size_t t = 0; t < len; ++t) {
    const unsigned bit = t < info_bits.size() ? info_bits[t] & 1u : 0u;
    const auto label = code.output(state, bit);
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>((label >> i) & 1u));
    state = code.next_state(state, bit);
  }
  return out;
}

Trellis::Trellis(const ConvCode& code)
    : num_states_(std::size_t{1} << code.memory()),
      n_outputs_(code.n_outputs()),
      memory_(code.memory()),
      branches_(2 * num_states_),
      incoming_(2 * num_states_) {
  std::vector<unsigned> fill(num_states_, 0);
  for (std::uint32_t s = 0; s < num_states_; ++s) {
    for (unsigned b = 0; b < 2; ++b) {
      const Branch br{code.next_state(s, b), code.output(s, b)};
      branches_[2 * s + b] = br;
      auto& slot = fill[br.next];
      if (slot >= 2) throw std::logic_error("trellis state with more than two incoming branches");
      incoming_[2 * br.next + slot++] = IncomingBranch{s, static_cast<std::uint8_t>(b)};
    }
  }
}

void Trellis::dump_csv(std::ostream& os) const {
  os << "state,input,next_state,label\n";
  for (std::uint32_t s = 0; s < num_states_; ++s) {
    for (unsigned b = 0; b < 2; ++b) {
      const auto& br = branch(s, b);
      os << s << ',' << b << ',' << br.next << ',';
      for (unsigned i = 0; i < n_outputs_; ++i) os << ((br.label >> i) & 1u);
      os << '\n';
    }
  }
}

unsigned free_distance(const ConvCode& code, std::size_t max_transitions) {
  if (max_transitions == 0) max_transitions = 10 * code.constraint_length();
  constexpr unsigned kInf = std::numeric_limits<unsigned>::max();
  const Trellis trellis(code);
  const std::size_t ns = trellis.num_states();

  unsigned best = kInf;
  std::vector<unsigned> open(ns, kInf), next(ns, kInf);

  auto relax = [&](std::uint32_t from, unsigned weight_so_far, unsigned bit) {
    const auto& br = trellis.branch(from, bit);
    const unsigned w = weight_so_far + static_cast<unsigned>(std::popcount(br.label));
    if (br.next == 0) {
      best = std::min(best, w);
    } else {
      next[br.next] = std::min(next[br.next], w);
    }
  };

  relax(0, 0, 1);
  for (std::size_t step = 1;; ++step) {
    open.swap(next);
    std::fill(next.begin(), next.end(), kInf);
    const unsigned open_min = *std::min_element(open.begin(), open.end());
    if (open_min >= best) return best;
    if (step >= max_transitions)
      throw std::runtime_error("free_distance: search bound exhausted (catastrophic or pathological generators)");
    for (std::uint32_t s = 1; s < ns; ++s) {
      if (open[s] == kInf) continue;
      relax(s, open[s], 0);
      relax(s, open[s], 1);
    }
  }
}

}  // namespace p2stc
