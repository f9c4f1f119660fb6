#pragma once

#include <gmpxx.h>

#include <string>

namespace ghc {

using Q = mpq_class;
using Z = mpz_class;

inline Q make_q(long num, long den = 1) {
  Q q(num, den);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Q& q) { return q.get_str(); }

// Accepts "a", "a/b" or a JSON-style pair handled by callers.
inline Q parse_q(const std::string& s) {
  Q q(s, 10);
  q.canonicalize();
  return q;
}

inline bool is_zero(const Q& q) { return sgn(q) == 0; }

}  // namespace ghc
