#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "pbcore/errors.hpp"

namespace pbcore {

// Exact rational number. All election arithmetic is exact; nothing in this
// library ever rounds a cost, a budget or an exact satisfaction value.
using Rat = mpq_class;

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

// Parses "15", "-3", "13331/2" or an exact decimal such as "6665.5" / "0.05".
// Decimal literals convert exactly; they never pass through floating point.
inline Rat parse_rat(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  const auto fail = [&]() -> Rat {
    throw ParseError("not a rational number: '" + std::string(text) + "'");
  };
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return fail();

  Rat result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den)) return fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) return fail();
    result = Rat(mpz_class(std::string(num), 10), d);
    result.canonicalize();
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (!ip.empty() && !detail::all_digits(ip)) return fail();
    if (!fp.empty() && !detail::all_digits(fp)) return fail();
    std::string digits = std::string(ip) + std::string(fp);
    if (digits.empty()) return fail();
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    result = Rat(mpz_class(digits, 10), den);
    result.canonicalize();
  } else {
    if (!detail::all_digits(s)) return fail();
    result = Rat(mpz_class(std::string(s), 10));
  }
  if (negative) result = -result;
  return result;
}

// Canonical text form: "n" when the denominator is 1, otherwise "n/d".
// parse_rat(rat_str(x)) == x for every x.
inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace pbcore
