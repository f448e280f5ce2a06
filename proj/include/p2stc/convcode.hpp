#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "p2stc/common.hpp"

namespace p2stc {

inline constexpr unsigned kMaxConstraintLength = 16;
inline constexpr unsigned kMaxOutputs = 8;

/// Feed-forward rate 1/N convolutional code.
///
/// Generators are K-bit polynomials in the classical octal convention: the most
/// significant tap multiplies the current input bit, the least significant tap
/// the oldest register bit. Output bit i of a transition comes from generator i.
class ConvCode {
 public:
  ConvCode(unsigned constraint_length, std::vector<std::uint32_t> generators);

  /// "133,171" style. K is the bit width of the widest generator unless given.
  static ConvCode from_octal(std::string_view csv, unsigned constraint_length = 0);

  [[nodiscard]] unsigned n_outputs() const { return static_cast<unsigned>(generators_.size()); }
  [[nodiscard]] unsigned constraint_length() const { return k_; }
  [[nodiscard]] unsigned memory() const { return k_ - 1; }
  [[nodiscard]] const std::vector<std::uint32_t>& generators() const { return generators_; }
  [[nodiscard]] std::string octal() const;

  /// Coded label (bit i = generator i) and next state for input `bit` from `state`.
  /// State holds the K-1 most recent inputs, newest in the most significant position.
  [[nodiscard]] std::uint32_t output(std::uint32_t state, unsigned bit) const;
  [[nodiscard]] std::uint32_t next_state(std::uint32_t state, unsigned bit) const;

 private:
  unsigned k_;
  std::vector<std::uint32_t> generators_;
};

/// Encodes from the all-zero state. With `terminate`, K-1 zero tail bits are
/// appended. Output is transition-major, generator index ascending.
Bits encode(const ConvCode& code, const Bits& info_bits, bool terminate = true);

struct Branch {
  std::uint32_t next;
  std::uint32_t label;
};

struct IncomingBranch {
  std::uint32_t prev;
  std::uint8_t input;
};

class Trellis {
 public:
  explicit Trellis(const ConvCode& code);

  [[nodiscard]] std::size_t num_states() const { return num_states_; }
  [[nodiscard]] unsigned n_outputs() const { return n_outputs_; }
  [[nodiscard]] unsigned memory() const { return memory_; }
  [[nodiscard]] const Branch& branch(std::uint32_t state, unsigned bit) const { return branches_[2 * state + bit]; }
  /// The two branches entering `state`, in (prev, input) ascending order.
  [[nodiscard]] const IncomingBranch& incoming(std::uint32_t state, unsigned j) const {
    return incoming_[2 * state + j];
  }

  /// CSV: state,input,next_state,label (label as N-character bit string).
  void dump_csv(std::ostream& os) const;

 private:
  std::size_t num_states_;
  unsigned n_outputs_;
  unsigned memory_;
  std::vector<Branch> branches_;
  std::vector<IncomingBranch> incoming_;
};

inline Trellis build_trellis(const ConvCode& code) { return Trellis(code); }

/// Minimum Hamming weight over paths leaving and re-entering the zero state.
/// Throws if the bound (default 10K transitions) is exhausted before the
/// minimum is certain.
unsigned free_distance(const ConvCode& code, std::size_t max_transitions = 0);

}  // namespace p2stc
