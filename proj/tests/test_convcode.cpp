#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "p2stc/convcode.hpp"

using namespace p2stc;

namespace {

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

}  // namespace

TEST_CASE("bit strings parse and format") {
  CHECK(parse_bits("10 11\n") == Bits{1, 0, 1, 1});
  CHECK_THROWS_AS(parse_bits("1021"), std::invalid_argument);
  CHECK(format_bits({1, 1, 0, 1, 0, 0, 1, 0}, 2) == "11 01 00 10");
  CHECK(format_bits({1, 0, 1}) == "101");
}

TEST_CASE("rationals reduce and compare") {
  CHECK(Rational(10, 15) == Rational(2, 3));
  CHECK(Rational::parse("5/8").str() == "5/8");
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK_THROWS(Rational(1, 0));
  CHECK_THROWS(Rational::parse("5-8"));
}

TEST_CASE("code construction and validation") {
  const auto c = ConvCode::from_octal("5,7");
  CHECK(c.constraint_length() == 3);
  CHECK(c.n_outputs() == 2);
  CHECK(c.octal() == "5,7");
  CHECK(ConvCode::from_octal("133,171").constraint_length() == 7);
  CHECK(ConvCode::from_octal("133,145,175").n_outputs() == 3);

  CHECK_THROWS_AS(ConvCode(17, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(ConvCode(3, {}), std::invalid_argument);
  CHECK_THROWS_AS(ConvCode(3, {0, 7}), std::invalid_argument);
  CHECK_THROWS_AS(ConvCode(3, {5, 017}), std::invalid_argument);
  CHECK_THROWS_AS(ConvCode(3, {5, 5}), std::invalid_argument);
  CHECK_THROWS(ConvCode::from_octal("5,9"));
  CHECK_THROWS(ConvCode::from_octal(""));
}

TEST_CASE("trellis structure") {
  const auto t57 = build_trellis(ConvCode::from_octal("5,7"));
  CHECK(t57.num_states() == 4);
  CHECK(t57.branch(0, 1).label == 0b11);
  CHECK(t57.branch(0, 0).label == 0);
  CHECK(t57.branch(0, 0).next == 0);
  CHECK(build_trellis(ConvCode::from_octal("133,171")).num_states() == 64);

  // Every state has exactly two incoming branches and they point back correctly.
  const auto t = build_trellis(ConvCode::from_octal("133,145,175"));
  for (std::uint32_t s = 0; s < t.num_states(); ++s) {
    for (unsigned j = 0; j < 2; ++j) {
      const auto in = t.incoming(s, j);
      CHECK(t.branch(in.prev, in.input).next == s);
    }
    CHECK(t.incoming(s, 0).prev < t.incoming(s, 1).prev);
  }

  std::ostringstream os;
  t57.dump_csv(os);
  const auto csv = os.str();
  CHECK(csv.rfind("state,input,next_state,label\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 8);
}

TEST_CASE("encoder matches fixed examples") {
  const auto c = ConvCode::from_octal("5,7");
  CHECK(format_bits(encode(c, parse_bits("1011"), false), 2) == "11 01 00 10");
  // Input 1 followed by the two tail zeros.
  CHECK(format_bits(encode(c, parse_bits("1"), true), 2) == "11 01 11");
  CHECK(encode(c, Bits(9, 0)) == Bits(22, 0));
  CHECK_THROWS(encode(c, Bits{}));
}

TEST_CASE("encoder agrees with direct convolution") {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<std::vector<std::uint32_t>, unsigned>> codes = {
      {{05, 07}, 3}, {{0133, 0171}, 7}, {{0133, 0145, 0175}, 7}, {{013, 015, 017, 011}, 4}, {{03, 01}, 2}};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& [gens, k] = codes[trial % codes.size()];
    const ConvCode code(k, gens);
    const auto info = random_bits(rng, 1 + rng() % 40);
    const bool term = trial % 2 == 0;
    REQUIRE(encode(code, info, term) == oracle::convolve(gens, k, info, term));
  }
}

TEST_CASE("trellis walk reproduces the encoder") {
  std::mt19937_64 rng(11);
  for (const char* g : {"5,7", "133,171", "133,145,175"}) {
    const auto code = ConvCode::from_octal(g);
    const auto tr = build_trellis(code);
    for (int trial = 0; trial < 300; ++trial) {
      const auto info = random_bits(rng, 1 + rng() % 50);
      const auto coded = encode(code, info, true);
      Bits walked;
      std::uint32_t s = 0;
      for (std::size_t t = 0; t < info.size() + code.memory(); ++t) {
        const unsigned b = t < info.size() ? info[t] : 0;
        const auto& br = tr.branch(s, b);
        for (unsigned i = 0; i < code.n_outputs(); ++i) walked.push_back((br.label >> i) & 1u);
        s = br.next;
      }
      REQUIRE(walked == coded);
      CHECK(s == 0);  // termination returns to the zero state
    }
  }
}

TEST_CASE("encoder is linear over GF(2)") {
  std::mt19937_64 rng(3);
  const auto code = ConvCode::from_octal("133,171");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const auto a = random_bits(rng, n);
    const auto b = random_bits(rng, n);
    Bits x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i] ^ b[i];
    const auto ca = encode(code, a), cb = encode(code, b), cx = encode(code, x);
    for (std::size_t i = 0; i < cx.size(); ++i) REQUIRE(cx[i] == (ca[i] ^ cb[i]));
  }
}

TEST_CASE("free distance matches the brute-force oracle") {
  CHECK(oracle::free_distance({05, 07}, 3, 10) == 5);
  CHECK(oracle::free_distance({0133, 0171}, 7, 16) == 10);
  CHECK(oracle::free_distance({0133, 0145, 0175}, 7, 16) == 15);

  CHECK(free_distance(ConvCode::from_octal("5,7")) == 5);
  CHECK(free_distance(ConvCode::from_octal("133,171")) == 10);
  CHECK(free_distance(ConvCode::from_octal("133,145,175")) == 15);

  // A few small codes cross-checked against the oracle.
  for (const auto& gens : std::vector<std::vector<std::uint32_t>>{{07, 05}, {017, 015}, {013, 017}, {015, 017, 013}}) {
    const unsigned k = gens[0] > 07 || gens[1] > 07 ? 4 : 3;
    CHECK(free_distance(ConvCode(k, gens)) == oracle::free_distance(gens, k, 14));
  }
}

TEST_CASE("free distance search gives up on catastrophic codes") {
  // (1+D, 1+D^2) shares the factor 1+D: the all-ones input never remerges
  // and keeps a constant output weight.
  CHECK_THROWS(free_distance(ConvCode(3, {06, 05}), 200));
}
