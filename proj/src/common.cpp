#include "p2stc/common.hpp"

#include <cctype>
#include <charconv>

namespace p2stc {

Bits parse_bits(std::string_view text) {
  Bits bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument(std::string("invalid bit character '") + c + "'");
    }
  }
  return bits;
}

std::string format_bits(const Bits& bits, std::size_t group) {
  std::string out;
  out.reserve(bits.size() + (group ? bits.size() / group : 0));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (group && i && i % group == 0) out.push_back(' ');
    out.push_back(bits[i] ? '1' : '0');
  }
  return out;
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw std::invalid_argument("invalid rational '" + std::string(text) + "'");
    return v;
  };
  if (slash == std::string_view::npos) return {parse_int(text), 1};
  return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
}

}  // namespace p2stc
