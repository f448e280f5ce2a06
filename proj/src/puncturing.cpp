#include "p2stc/puncturing.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace p2stc {

PuncturingMatrix::PuncturingMatrix(std::vector<std::string> rows) : row_strings_(std::move(rows)) {
  if (row_strings_.empty()) throw std::invalid_argument("puncturing matrix without rows");
  n_rows_ = static_cast<unsigned>(row_strings_.size());
  period_ = static_cast<unsigned>(row_strings_.front().size());
  if (period_ == 0) throw std::invalid_argument("puncturing matrix with empty rows");
  mask_.reserve(std::size_t{n_rows_} * period_);
  for (const auto& row : row_strings_) {
    if (row.size() != period_) throw std::invalid_argument("puncturing matrix rows of unequal length");
    bool any = false;
    for (char c : row) {
      if (c != '0' && c != '1') throw std::invalid_argument("puncturing matrix entries must be '0' or '1'");
      mask_.push_back(c == '1');
      any |= c == '1';
      zeros_ += c == '0';
    }
    if (!any) throw std::invalid_argument("puncturing matrix row '" + row + "' erases every bit");
  }
  if (kept_per_period() < period_)
    throw std::invalid_argument("puncturing matrix keeps fewer bits than the period (rate above 1)");
}

PuncturingMatrix PuncturingMatrix::identity(unsigned n_rows, unsigned period) {
  return PuncturingMatrix(std::vector<std::string>(n_rows, std::string(period, '1')));
}

std::string PuncturingMatrix::str() const {
  std::string out;
  for (std::size_t i = 0; i < row_strings_.size(); ++i) {
    if (i) out.push_back('/');
    out += row_strings_[i];
  }
  return out;
}

PuncturingMatrix parse_matrix(std::string_view text) {
  std::vector<std::string> rows;
  std::string current;
  for (char c : text) {
    if (c == '/' || c == ',' || c == ';') {
      rows.push_back(std::move(current));
      current.clear();
    } else if (c != ' ' && c != '"') {
      current.push_back(c);
    }
  }
  rows.push_back(std::move(current));
  return PuncturingMatrix(std::move(rows));
}

Rational punctured_rate(unsigned period, unsigned n_outputs, unsigned zeros) {
  if (period < 1 || n_outputs < 1) throw std::invalid_argument("punctured_rate: period and N must be positive");
  const std::int64_t total = std::int64_t{period} * n_outputs;
  if (zeros >= total) throw std::invalid_argument("punctured_rate: every bit erased");
  if (total - zeros < period) throw std::invalid_argument("punctured_rate: kept bits below period, rate above 1");
  return {period, total - zeros};
}

Bits apply_puncture(const Bits& coded_bits, const PuncturingMatrix& matrix) {
  const unsigned n = matrix.rows();
  if (coded_bits.size() % n != 0) throw std::invalid_argument("apply_puncture: partial transition in input");
  Bits out;
  out.reserve(coded_bits.size());
  const std::size_t transitions = coded_bits.size() / n;
  for (std::size_t t = 0; t < transitions; ++t)
    for (unsigned i = 0; i < n; ++i)
      if (matrix.keep(i, t)) out.push_back(coded_bits[t * n + i]);
  return out;
}

SuperSymbolFrame map_to_supersymbols(const Bits& surviving_bits, unsigned n_antennas, PadMode mode) {
  if (n_antennas == 0) throw std::invalid_argument("map_to_supersymbols: zero antennas");
  SuperSymbolFrame frame;
  frame.n_antennas = n_antennas;
  const std::size_t rem = surviving_bits.size() % n_antennas;
  if (rem != 0 && mode == PadMode::strict)
    throw std::invalid_argument("map_to_supersymbols: " + std::to_string(surviving_bits.size()) +
                                " bits do not fill whole super-symbols of " + std::to_string(n_antennas));
  frame.values.reserve(surviving_bits.size() + n_antennas);
  for (auto b : surviving_bits) frame.values.push_back(static_cast<std::int8_t>(2 * int{b} - 1));
  if (rem != 0) {
    frame.values.resize(frame.values.size() + (n_antennas - rem), std::int8_t{-1});
    frame.padded = true;
  }
  return frame;
}

std::uint32_t SymbolLayout::first_transition(std::size_t symbol) const {
  std::uint32_t t = source(symbol, 0).transition;
  for (unsigned j = 1; j < n_antennas; ++j) t = std::min(t, source(symbol, j).transition);
  return t;
}

std::uint32_t SymbolLayout::last_transition(std::size_t symbol) const {
  std::uint32_t t = source(symbol, 0).transition;
  for (unsigned j = 1; j < n_antennas; ++j) t = std::max(t, source(symbol, j).transition);
  return t;
}

SymbolLayout build_layout(const PuncturingMatrix& matrix, std::size_t n_transitions) {
  SymbolLayout layout;
  layout.n_antennas = matrix.rows();
  layout.n_transitions = n_transitions;
  for (std::size_t t = 0; t < n_transitions; ++t)
    for (unsigned i = 0; i < matrix.rows(); ++i)
      if (matrix.keep(i, t))
        layout.sources.push_back(AntennaSource{static_cast<std::uint32_t>(t), static_cast<std::uint8_t>(i)});
  if (layout.sources.size() % layout.n_antennas != 0)
    throw std::invalid_argument("layout: " + std::to_string(layout.sources.size()) +
                                " surviving bits do not fill whole super-symbols");
  for (std::size_t s = 0; s < layout.n_symbols(); ++s) {
    // Transitions are non-decreasing within a symbol, so distinct count = number of changes + 1.
    unsigned distinct = 1;
    for (unsigned j = 1; j < layout.n_antennas; ++j)
      distinct += layout.source(s, j).transition != layout.source(s, j - 1).transition;
    if (distinct > 2)
      throw std::invalid_argument("super-symbol " + std::to_string(s) + " carries bits from " +
                                  std::to_string(distinct) + " trellis transitions (at most 2 supported)");
  }
  return layout;
}

std::vector<SpanningEvent> spanning_events(const SymbolLayout& layout) {
  std::vector<SpanningEvent> events;
  bool open = false;
  std::uint32_t prev_right = 0;
  for (std::size_t s = 0; s < layout.n_symbols(); ++s) {
    if (!layout.spans(s)) {
      open = false;
      continue;
    }
    if (open && layout.first_transition(s) == prev_right) {
      ++events.back().delta;
    } else {
      events.push_back(SpanningEvent{s, 1});
    }
    open = true;
    prev_right = layout.last_transition(s);
  }
  return events;
}

unsigned SpanningMap::delta() const {
  unsigned d = 0;
  for (const auto& e : events) d = std::max(d, e.delta);
  return d;
}

std::size_t SpanningMap::spanning_count() const {
  return static_cast<std::size_t>(std::count_if(symbols.begin(), symbols.end(), [](auto& s) { return s.spanning(); }));
}

void SpanningMap::dump_csv(std::ostream& os) const {
  os << "symbol_index,transitions,n_L,n_R\n";
  for (const auto& s : symbols) {
    os << s.index << ',' << s.left;
    if (s.spanning()) os << '-' << s.right;
    os << ',' << s.n_left << ',' << s.n_right << '\n';
  }
}

SpanningMap spanning_map(const PuncturingMatrix& matrix) {
  const unsigned n = matrix.rows();
  const unsigned kept = matrix.kept_per_period();
  const unsigned h = n / std::gcd(kept, n);
  const std::size_t window = std::size_t{h} * matrix.period();
  const auto layout = build_layout(matrix, 2 * window);

  SpanningMap map;
  map.periods = h;
  map.window_transitions = window;
  const std::size_t first = std::size_t{h} * kept / n;
  const std::size_t last = 2 * first;
  for (std::size_t s = first; s < last; ++s) {
    SpanningSymbol sym;
    sym.index = s - first;
    sym.left = layout.first_transition(s) - static_cast<std::uint32_t>(window);
    sym.right = layout.last_transition(s) - static_cast<std::uint32_t>(window);
    sym.n_total = n;
    for (unsigned j = 0; j < n; ++j) {
      const auto t = layout.source(s, j).transition - window;
      sym.n_left += t == sym.left;
      sym.n_right += t == sym.right && sym.right != sym.left;
    }
    map.symbols.push_back(sym);
  }

  bool open = false;
  std::uint32_t prev_right = 0;
  for (const auto& sym : map.symbols) {
    if (!sym.spanning()) {
      open = false;
      continue;
    }
    if (open && sym.left == prev_right) {
      ++map.events.back().delta;
    } else {
      map.events.push_back(SpanningEvent{sym.index, 1});
    }
    open = true;
    prev_right = sym.right;
  }
  // An event crossing the window seam shows up as a tail chain and a head chain.
  if (map.events.size() >= 2) {
    const auto& head = map.symbols.front();
    const auto& tail = map.symbols.back();
    if (head.spanning() && tail.spanning() && head.left + window == tail.right) {
      map.events.back().delta += map.events.front().delta;
      map.events.erase(map.events.begin());
    }
  }
  return map;
}

RateCompatibilityReport check_rate_compatible(const PuncturingMatrix& low_rate, const PuncturingMatrix& high_rate) {
  if (low_rate.rows() != high_rate.rows() || low_rate.period() != high_rate.period())
    throw std::invalid_argument("check_rate_compatible: matrices differ in dimensions");
  RateCompatibilityReport report;
  for (unsigned i = 0; i < low_rate.rows(); ++i)
    for (unsigned c = 0; c < low_rate.period(); ++c)
      if (!low_rate.keep(i, c) && high_rate.keep(i, c)) report.violations.emplace_back(i + 1, c + 1);
  report.compatible = report.violations.empty();
  return report;
}

const std::vector<NamedMatrix>& catalog() {
  static const std::vector<NamedMatrix> entries = [] {
    std::vector<NamedMatrix> v;
    auto add = [&](std::string name, std::vector<std::string> rows) {
      v.push_back(NamedMatrix{std::move(name), PuncturingMatrix(std::move(rows))});
    };
    add("Eq5", {"1011", "1101"});
    add("Eq9", {"101111", "111101"});

    add("TableI-5/9", {"1101111111", "1011111111"});
    add("TableI-5/8", {"1101011111", "1010111111"});
    add("TableI-5/7", {"1101010111", "1010101111"});
    add("TableI-5/6", {"1101010101", "1010101011"});

    add("TableII-10/27", {"1101111111", "1101111111", "1011111111"});
    add("TableII-10/24", {"1010111111", "1010111111", "0101111111"});
    add("TableII-10/21", {"1010101111", "1010101111", "0101011111"});
    add("TableII-10/18", {"1010101011", "1010101011", "0101010111"});
    add("TableII-10/15", {"1010101010", "1010101010", "0101010101"});

    add("Basic-N2-a", {"10", "01"});
    add("Basic-N2-b", {"01", "10"});
    add("Basic-N3-a", {"10", "10", "01"});
    add("Basic-N3-b", {"10", "01", "10"});
    return v;
  }();
  return entries;
}

const PuncturingMatrix& catalog_lookup(std::string_view name) {
  for (const auto& e : catalog())
    if (e.name == name) return e.matrix;
  throw std::invalid_argument("unknown catalog matrix '" + std::string(name) + "'");
}

PuncturingMatrix resolve_matrix(std::string_view name_or_rows) {
  for (const auto& e : catalog())
    if (e.name == name_or_rows) return e.matrix;
  return parse_matrix(name_or_rows);
}

}  // namespace p2stc
