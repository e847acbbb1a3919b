#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace subrc {

/// Exact rational scalar. mpq_class keeps values canonical: denominator > 0,
/// fraction in lowest terms.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// Renders as "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses "p", "-p", or "p/q" with q > 0 after canonicalization.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t slash = s.find('/');
  std::string num = (slash == std::string::npos) ? s : s.substr(0, slash);
  std::string den = (slash == std::string::npos) ? "1" : s.substr(slash + 1);
  auto digits_ok = [](const std::string& t, bool allow_sign) {
    if (t.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (t[0] == '-' || t[0] == '+')) i = 1;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw std::invalid_argument("bad rational literal: " + s);
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
    throw std::invalid_argument("bad rational literal: " + s);
  if (sgn(Rational(q.get_den())) == 0)
    throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

inline Rational abs_rat(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Deterministic xorshift PRNG for reproducible sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return state_;
  }

  long next_int(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Rational next_rational(long max_num = 3, long max_den = 3) {
    long n = next_int(-max_num, max_num);
    long d = next_int(1, max_den);
    return rat(n, d);
  }

 private:
  std::uint64_t state_;
};

}  // namespace subrc
