#include <random>
#include <sstream>

#include "doctest.h"
#include "p2stc/convcode.hpp"
#include "p2stc/puncturing.hpp"

using namespace p2stc;

TEST_CASE("matrix parsing and validation") {
  const auto m = parse_matrix("1011/1101");
  CHECK(m.rows() == 2);
  CHECK(m.period() == 4);
  CHECK(m.zeros() == 2);
  CHECK(m.kept_per_period() == 6);
  CHECK(m.str() == "1011/1101");
  CHECK(parse_matrix("1011,1101") == m);
  CHECK(parse_matrix("1011;1101") == m);
  CHECK_FALSE(m.keep(0, 1));
  CHECK_FALSE(m.keep(0, 5));  // wraps with the period

  CHECK_THROWS_AS(parse_matrix("1012/1101"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix("101/1101"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix("0000/1111"), std::invalid_argument);  // all-zero row
  CHECK_THROWS_AS(parse_matrix(""), std::invalid_argument);
  CHECK_THROWS_AS(PuncturingMatrix({"10", "00"}), std::invalid_argument);
}

TEST_CASE("punctured rate") {
  CHECK(punctured_rate(10, 2, 2) == Rational(5, 9));
  CHECK(punctured_rate(10, 3, 15) == Rational(10, 15));
  CHECK(punctured_rate(10, 3, 0) == Rational(1, 3));
  CHECK(punctured_rate(1, 2, 0) == Rational(1, 2));
  CHECK(punctured_rate(PuncturingMatrix::identity(3)) == Rational(1, 3));
  CHECK_THROWS(punctured_rate(4, 2, 8));
}

TEST_CASE("catalog rates are exact") {
  const std::vector<std::pair<const char*, Rational>> expected = {
      {"TableI-5/9", {5, 9}},      {"TableI-5/8", {5, 8}},      {"TableI-5/7", {5, 7}},
      {"TableI-5/6", {5, 6}},      {"TableII-10/27", {10, 27}}, {"TableII-10/24", {10, 24}},
      {"TableII-10/21", {10, 21}}, {"TableII-10/18", {10, 18}}, {"TableII-10/15", {10, 15}},
      {"Eq5", {2, 3}},             {"Eq9", {3, 5}}};
  for (const auto& [name, rate] : expected) {
    CAPTURE(name);
    CHECK(punctured_rate(catalog_lookup(name)) == rate);
  }
}

TEST_CASE("catalog lookup") {
  CHECK(catalog_lookup("TableI-5/8").row_strings() == std::vector<std::string>{"1101011111", "1010111111"});
  CHECK(catalog_lookup("Eq5").row_strings() == std::vector<std::string>{"1011", "1101"});
  CHECK(catalog_lookup("TableII-10/27").row_strings() ==
        std::vector<std::string>{"1101111111", "1101111111", "1011111111"});
  CHECK_THROWS_AS(catalog_lookup("TableIII-1/2"), std::invalid_argument);
  CHECK(resolve_matrix("Eq9") == catalog_lookup("Eq9"));
  CHECK(resolve_matrix("10/01").str() == "10/01");
  CHECK(catalog().size() == 15);
}

TEST_CASE("puncturing drops masked bits") {
  const auto eq5 = catalog_lookup("Eq5");
  CHECK(apply_puncture(parse_bits("11 01 00 10"), eq5) == parse_bits("111010"));

  const auto coded = parse_bits("10 01 11 00 01 11");
  CHECK(apply_puncture(coded, PuncturingMatrix::identity(2)) == coded);

  // The mask is reapplied unchanged in the second period.
  const auto two = parse_bits("11 01 00 10 11 01 00 10");
  CHECK(apply_puncture(two, eq5) == parse_bits("111010 111010"));
  CHECK_THROWS(apply_puncture(parse_bits("110"), eq5));
}

TEST_CASE("super-symbol mapping") {
  const auto f = map_to_supersymbols(parse_bits("111010"), 2);
  CHECK(f.size() == 3);
  CHECK(f.values == std::vector<std::int8_t>{1, 1, 1, -1, 1, -1});
  CHECK_FALSE(f.padded);

  const auto zeros = map_to_supersymbols(Bits(6, 0), 3);
  CHECK(zeros.values == std::vector<std::int8_t>(6, -1));

  CHECK_THROWS_AS(map_to_supersymbols(parse_bits("11101"), 2), std::invalid_argument);
  const auto padded = map_to_supersymbols(parse_bits("11101"), 2, PadMode::lenient);
  CHECK(padded.padded);
  CHECK(padded.size() == 3);
  CHECK(padded.at(2, 1) == -1);

  // Unpunctured: symbol t is transition t's label.
  const auto code = ConvCode::from_octal("133,171");
  const auto coded = encode(code, parse_bits("1101001"));
  const auto s = map_to_supersymbols(coded, 2);
  for (std::size_t t = 0; t < s.size(); ++t)
    for (unsigned j = 0; j < 2; ++j) CHECK(s.at(t, j) == 2 * coded[2 * t + j] - 1);
}

TEST_CASE("layout of the Eq5 matrix") {
  const auto layout = build_layout(catalog_lookup("Eq5"), 4);
  REQUIRE(layout.n_symbols() == 3);
  CHECK_FALSE(layout.spans(0));
  CHECK(layout.spans(1));
  CHECK(layout.first_transition(1) == 1);
  CHECK(layout.last_transition(1) == 2);
  CHECK(layout.source(1, 0).output == 1);  // second row survives at column 2
  CHECK(layout.source(1, 1).output == 0);
  CHECK_FALSE(layout.spans(2));
  const auto events = spanning_events(layout);
  REQUIRE(events.size() == 1);
  CHECK(events[0].first_symbol == 1);
  CHECK(events[0].delta == 1);

  CHECK_THROWS(build_layout(catalog_lookup("Eq5"), 2));  // 3 survivors
  // Three transitions in one symbol.
  CHECK_THROWS(build_layout(parse_matrix("100/010/001"), 3));
}

TEST_CASE("spanning maps") {
  const auto eq5 = spanning_map(catalog_lookup("Eq5"));
  CHECK(eq5.delta() == 1);
  CHECK(eq5.spanning_count() == 1);
  REQUIRE(eq5.symbols.size() == 3);
  CHECK(eq5.symbols[1].left == 1);
  CHECK(eq5.symbols[1].right == 2);
  CHECK(eq5.symbols[1].n_left == 1);
  CHECK(eq5.symbols[1].n_right == 1);

  const auto eq9 = spanning_map(catalog_lookup("Eq9"));
  CHECK(eq9.delta() == 3);
  CHECK(eq9.spanning_count() == 3);
  REQUIRE(eq9.events.size() == 1);
  CHECK(eq9.events[0].first_symbol == 1);
  for (std::size_t s = 1; s <= 3; ++s) {
    CHECK(eq9.symbols[s].left == s);
    CHECK(eq9.symbols[s].right == s + 1);
  }

  const auto id = spanning_map(PuncturingMatrix::identity(2, 4));
  CHECK(id.delta() == 0);
  CHECK(id.events.empty());
  for (const auto& s : id.symbols) CHECK_FALSE(s.spanning());

  std::ostringstream os;
  eq5.dump_csv(os);
  CHECK(os.str() == "symbol_index,transitions,n_L,n_R\n0,0,2,0\n1,1-2,1,1\n2,3,2,0\n");

  // One erased bit with N=2 leaves an odd survivor count per period: the
  // window covers two periods.
  const auto odd = spanning_map(parse_matrix("011/111"));
  CHECK(odd.periods == 2);
  CHECK(odd.window_transitions == 6);
  CHECK(odd.delta() == 3);
}

TEST_CASE("catalog matrices spanning structure") {
  for (const auto& e : catalog()) {
    CAPTURE(e.name);
    const auto map = spanning_map(e.matrix);
    std::size_t bits = 0;
    for (const auto& s : map.symbols) {
      CHECK(s.n_left + s.n_right == s.n_total);
      bits += s.n_total;
    }
    CHECK(bits == std::size_t{map.periods} * e.matrix.kept_per_period());
  }
}

TEST_CASE("rate compatibility") {
  const auto r59 = catalog_lookup("TableI-5/9");
  CHECK(check_rate_compatible(r59, catalog_lookup("TableI-5/8")).compatible);
  CHECK(check_rate_compatible(r59, r59).compatible);
  CHECK(check_rate_compatible(catalog_lookup("TableI-5/8"), catalog_lookup("TableI-5/7")).compatible);
  CHECK(check_rate_compatible(catalog_lookup("TableI-5/7"), catalog_lookup("TableI-5/6")).compatible);

  const auto r = check_rate_compatible(catalog_lookup("TableII-10/27"), catalog_lookup("TableII-10/24"));
  CHECK_FALSE(r.compatible);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations.front() == std::pair<unsigned, unsigned>{1, 3});

  CHECK_THROWS(check_rate_compatible(r59, catalog_lookup("Eq5")));
}
