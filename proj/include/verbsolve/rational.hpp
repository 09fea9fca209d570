#pragma once

#include <boost/rational.hpp>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace verbsolve {

// Exact arithmetic everywhere: answers are compared with == against gold
// values, so no floating point is allowed in the solver path.
using Rational = boost::rational<long long>;

// Replaces Devanagari digits (U+0966..U+096F) with ASCII digits. All other
// bytes pass through unchanged.
inline std::string normalize_digits(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    if (b0 == 0xE0 && i + 2 < text.size()) {
      const auto b1 = static_cast<unsigned char>(text[i + 1]);
      const auto b2 = static_cast<unsigned char>(text[i + 2]);
      if (b1 == 0xA5 && b2 >= 0xA6 && b2 <= 0xAF) {
        out.push_back(static_cast<char>('0' + (b2 - 0xA6)));
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

// Accepts "47", "-3", "4.5" and "9/2". Devanagari digits are normalized
// first. Returns nullopt on anything else (trailing garbage included).
inline std::optional<Rational> try_parse_rational(std::string_view raw) {
  const std::string text = normalize_digits(raw);
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  auto read_digits = [&](long long& value, int max_digits) -> bool {
    int seen = 0;
    value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (++seen > max_digits) return false;
      value = value * 10 + (text[pos] - '0');
      ++pos;
    }
    return seen > 0;
  };
  long long integral = 0;
  if (!read_digits(integral, 18)) return std::nullopt;
  if (pos == text.size()) return Rational(negative ? -integral : integral);
  if (text[pos] == '.') {
    ++pos;
    long long frac = 0, scale = 1;
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (scale > 100000000000000000LL) return std::nullopt;
      frac = frac * 10 + (text[pos] - '0');
      scale *= 10;
      ++pos;
    }
    if (pos == start || pos != text.size()) return std::nullopt;
    Rational value = Rational(integral) + Rational(frac, scale);
    return negative ? -value : value;
  }
  if (text[pos] == '/') {
    ++pos;
    long long den = 0;
    if (!read_digits(den, 18) || pos != text.size() || den == 0) return std::nullopt;
    const Rational value(integral, den);
    return negative ? -value : value;
  }
  return std::nullopt;
}

inline std::string to_string(const Rational& r) {
  std::string s = std::to_string(r.numerator());
  if (r.denominator() != 1) {
    s += '/';
    s += std::to_string(r.denominator());
  }
  return s;
}

}  // namespace verbsolve
