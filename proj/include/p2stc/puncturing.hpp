#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "p2stc/common.hpp"

namespace p2stc {

/// Periodic N×p keep(1)/erase(0) mask. Row i applies to mother-code output i.
class PuncturingMatrix {
 public:
  explicit PuncturingMatrix(std::vector<std::string> rows);
  static PuncturingMatrix identity(unsigned n_rows, unsigned period = 1);

  [[nodiscard]] unsigned rows() const { return n_rows_; }
  [[nodiscard]] unsigned period() const { return period_; }
  [[nodiscard]] bool keep(unsigned row, std::size_t column) const { return mask_[row * period_ + column % period_]; }
  [[nodiscard]] unsigned zeros() const { return zeros_; }
  [[nodiscard]] unsigned kept_per_period() const { return n_rows_ * period_ - zeros_; }
  [[nodiscard]] const std::vector<std::string>& row_strings() const { return row_strings_; }
  /// Rows joined with '/', e.g. "1011/1101".
  [[nodiscard]] std::string str() const;

  friend bool operator==(const PuncturingMatrix& a, const PuncturingMatrix& b) {
    return a.row_strings_ == b.row_strings_;
  }

 private:
  unsigned n_rows_ = 0;
  unsigned period_ = 0;
  unsigned zeros_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::string> row_strings_;
};

/// Parses "1011/1101" or "1011,1101".
PuncturingMatrix parse_matrix(std::string_view text);

/// R = p / (p·N − z).
Rational punctured_rate(unsigned period, unsigned n_outputs, unsigned zeros);
inline Rational punctured_rate(const PuncturingMatrix& m) { return punctured_rate(m.period(), m.rows(), m.zeros()); }

/// Drops erased bits. Input is transition-major (N bits per transition); the
/// mask column advances once per transition and wraps with the period.
Bits apply_puncture(const Bits& coded_bits, const PuncturingMatrix& matrix);

enum class PadMode { strict, lenient };

/// BPSK super-symbols, antenna-minor: values[t*N + j] is antenna j at channel use t.
struct SuperSymbolFrame {
  unsigned n_antennas = 0;
  std::vector<std::int8_t> values;
  bool padded = false;

  [[nodiscard]] std::size_t size() const { return n_antennas ? values.size() / n_antennas : 0; }
  [[nodiscard]] std::int8_t at(std::size_t t, unsigned antenna) const { return values[t * n_antennas + antenna]; }
};

/// Groups consecutive N surviving bits into one super-symbol (bit j → antenna j,
/// b → 2b−1). A trailing partial group throws in strict mode and is zero-padded
/// in lenient mode.
SuperSymbolFrame map_to_supersymbols(const Bits& surviving_bits, unsigned n_antennas,
                                     PadMode mode = PadMode::strict);

/// Which coded bit each antenna of each super-symbol carries.
struct AntennaSource {
  std::uint32_t transition;
  std::uint8_t output;
};

/// Frame-level super-symbol/transition alignment for a given puncturing
/// matrix and number of trellis transitions.
struct SymbolLayout {
  unsigned n_antennas = 0;
  std::size_t n_transitions = 0;
  std::vector<AntennaSource> sources;  // n_symbols × n_antennas

  [[nodiscard]] std::size_t n_symbols() const { return n_antennas ? sources.size() / n_antennas : 0; }
  [[nodiscard]] const AntennaSource& source(std::size_t symbol, unsigned antenna) const {
    return sources[symbol * n_antennas + antenna];
  }
  [[nodiscard]] std::uint32_t first_transition(std::size_t symbol) const;
  [[nodiscard]] std::uint32_t last_transition(std::size_t symbol) const;
  [[nodiscard]] bool spans(std::size_t symbol) const { return first_transition(symbol) != last_transition(symbol); }
};

/// Throws if the kept bit count is not a multiple of N or if any super-symbol
/// carries bits from three or more transitions.
SymbolLayout build_layout(const PuncturingMatrix& matrix, std::size_t n_transitions);

struct SpanningSymbol {
  std::size_t index = 0;     // within the steady-state window
  std::uint32_t left = 0;    // transitions, relative to the window start
  std::uint32_t right = 0;
  unsigned n_left = 0;       // bits of the left / right transition inside this symbol
  unsigned n_right = 0;
  unsigned n_total = 0;
  [[nodiscard]] bool spanning() const { return left != right; }
};

/// A maximal chain of spanning super-symbols, each one's right transition
/// being the next one's left transition.
struct SpanningEvent {
  std::size_t first_symbol = 0;
  unsigned delta = 0;
};

struct SpanningMap {
  unsigned periods = 1;                 // puncturing periods in the steady-state window
  std::size_t window_transitions = 0;
  std::vector<SpanningSymbol> symbols;
  std::vector<SpanningEvent> events;

  /// Largest δ over all events; 0 when nothing spans.
  [[nodiscard]] unsigned delta() const;
  [[nodiscard]] std::size_t spanning_count() const;
  /// CSV: symbol_index,transitions,n_L,n_R
  void dump_csv(std::ostream& os) const;
};

SpanningMap spanning_map(const PuncturingMatrix& matrix);

/// Groups spanning symbols of a layout into events (same chaining rule).
std::vector<SpanningEvent> spanning_events(const SymbolLayout& layout);

struct RateCompatibilityReport {
  bool compatible = true;
  /// 1-based (row, column) positions erased in the lower-rate matrix but kept
  /// in the higher-rate one.
  std::vector<std::pair<unsigned, unsigned>> violations;
};

RateCompatibilityReport check_rate_compatible(const PuncturingMatrix& low_rate, const PuncturingMatrix& high_rate);

struct NamedMatrix {
  std::string name;
  PuncturingMatrix matrix;
};

/// Built-in matrices: "Eq5", "Eq9", "TableI-5/9".."TableI-5/6",
/// "TableII-10/27".."TableII-10/15", "Basic-N2-a/b", "Basic-N3-a/b".
const std::vector<NamedMatrix>& catalog();
const PuncturingMatrix& catalog_lookup(std::string_view name);

/// Catalog name or literal rows.
PuncturingMatrix resolve_matrix(std::string_view name_or_rows);

}  // namespace p2stc
