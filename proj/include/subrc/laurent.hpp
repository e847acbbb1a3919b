#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "subrc/rational.hpp"

namespace subrc {

struct NegativeExponentAtZero : std::runtime_error {
  NegativeExponentAtZero() : std::runtime_error("laurent limit at 0 with negative exponent term") {}
};

/// Laurent polynomial in one variable mu (= lambda^2) with exact rational
/// coefficients; zero coefficients are never stored.
class Laurent {
 public:
  Laurent() = default;
  explicit Laurent(const Rational& c) {
    if (!is_zero(c)) c_[0] = c;
  }
  Laurent(const Rational& c, int exponent) {
    if (!is_zero(c)) c_[exponent] = c;
  }

  static Laurent mu(int exponent = 1) { return Laurent(Rational(1), exponent); }

  bool zero() const { return c_.empty(); }
  int lowest() const { return c_.empty() ? 0 : c_.begin()->first; }
  int highest() const { return c_.empty() ? 0 : c_.rbegin()->first; }

  Rational coeff(int e) const {
    auto it = c_.find(e);
    return it == c_.end() ? Rational(0) : it->second;
  }

  void add_term(int e, const Rational& v) {
    if (is_zero(v)) return;
    auto it = c_.find(e);
    if (it == c_.end()) {
      c_[e] = v;
    } else {
      it->second += v;
      if (is_zero(it->second)) c_.erase(it);
    }
  }

  Laurent operator-() const {
    Laurent r;
    for (const auto& [e, v] : c_) r.c_[e] = -v;
    return r;
  }
  Laurent operator+(const Laurent& o) const {
    Laurent r = *this;
    for (const auto& [e, v] : o.c_) r.add_term(e, v);
    return r;
  }
  Laurent operator-(const Laurent& o) const { return *this + (-o); }
  Laurent operator*(const Laurent& o) const {
    Laurent r;
    for (const auto& [e1, v1] : c_)
      for (const auto& [e2, v2] : o.c_) r.add_term(e1 + e2, v1 * v2);
    return r;
  }
  Laurent operator*(const Rational& s) const {
    Laurent r;
    if (is_zero(s)) return r;
    for (const auto& [e, v] : c_) r.c_[e] = v * s;
    return r;
  }
  Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
  Laurent& operator-=(const Laurent& o) { return *this = *this - o; }

  bool operator==(const Laurent& o) const { return c_ == o.c_; }

  /// Multiply by mu^k (exact division for k < 0).
  Laurent shifted(int k) const {
    Laurent r;
    for (const auto& [e, v] : c_) r.c_[e + k] = v;
    return r;
  }

  Rational eval(const Rational& mu_val) const {
    if (is_zero(mu_val)) throw std::invalid_argument("laurent eval at mu = 0");
    Rational r(0);
    for (const auto& [e, v] : c_) {
      Rational p(1);
      int k = e < 0 ? -e : e;
      for (int i = 0; i < k; ++i) p *= mu_val;
      r += (e < 0) ? Rational(v / p) : Rational(v * p);
    }
    return r;
  }

  /// Coefficient of mu^0 provided no negative-exponent terms survive.
  Rational limit0() const {
    if (!c_.empty() && c_.begin()->first < 0) throw NegativeExponentAtZero();
    return coeff(0);
  }

  std::string str() const {
    if (c_.empty()) return "0";
    std::string s;
    for (const auto& [e, v] : c_) {
      std::string term = to_string(v);
      if (e != 0) {
        term = (term == "1" ? "" : term == "-1" ? "-" : term + "*");
        term += (e == 1) ? "mu" : "mu^" + std::to_string(e);
      }
      if (!s.empty() && term[0] != '-') s += " + ";
      else if (!s.empty()) { s += " - "; term = term.substr(1); }
      s += term;
    }
    return s;
  }

 private:
  std::map<int, Rational> c_;
};

inline Laurent operator*(const Rational& s, const Laurent& p) { return p * s; }

}  // namespace subrc
