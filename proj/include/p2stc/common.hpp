#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace p2stc {

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Parses a string of '0'/'1' characters. Whitespace is skipped; anything else throws.
Bits parse_bits(std::string_view text);
std::string format_bits(const Bits& bits, std::size_t group = 0);

/// Exact non-negative rational number, always stored reduced.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  [[nodiscard]] std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  static Rational parse(std::string_view text);

  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
};

}  // namespace p2stc
