#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "exactpot/errors.hpp"

namespace exactpot {

/// Exact rational number; always kept in lowest terms with positive
/// denominator.
using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p/q" or "p" (optional sign, decimal digits).
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw InputError("empty rational literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '/' && !seen_slash) {
      seen_slash = true;
    } else if (c >= '0' && c <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw InputError("malformed rational literal '" + s + "'");
    }
  }
  if (!digit_before || (seen_slash && !digit_after)) {
    throw InputError("malformed rational literal '" + s + "'");
  }
  if (s[0] == '+') s.erase(0, 1);
  Rational q;
  if (q.set_str(s, 10) != 0) {
    throw InputError("malformed rational literal '" + s + "'");
  }
  if (q.get_den() == 0) throw InputError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace exactpot
