#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrc/rational.hpp"

namespace subrc {

struct SignatureMismatch : std::invalid_argument {
  explicit SignatureMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Dense tensor with constant components in a fixed frame. sig holds one
/// entry per slot: 'l' (covariant) or 'u' (contravariant).
struct Tensor {
  int n = 0;
  std::vector<char> sig;
  std::vector<Rational> data;

  Tensor() = default;
  Tensor(int dim, std::vector<char> signature) : n(dim), sig(std::move(signature)) {
    std::size_t sz = 1;
    for (std::size_t s = 0; s < sig.size(); ++s) sz *= static_cast<std::size_t>(n);
    data.assign(sz, Rational(0));
  }

  int rank() const { return static_cast<int>(sig.size()); }

  std::size_t offset(std::initializer_list<int> idx) const {
    if (idx.size() != sig.size()) throw SignatureMismatch("tensor index arity");
    std::size_t o = 0;
    for (int i : idx) o = o * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    return o;
  }

  Rational& at(std::initializer_list<int> idx) { return data[offset(idx)]; }
  const Rational& at(std::initializer_list<int> idx) const { return data[offset(idx)]; }

  bool zero() const {
    for (const auto& v : data)
      if (!is_zero(v)) return false;
    return true;
  }
};

/// Connection coefficients: nabla_{E_a} E_b = sum_c gamma(a,b,c) E_c.
struct ConnCoeffs {
  int n = 0;
  std::vector<Rational> g;

  ConnCoeffs() = default;
  explicit ConnCoeffs(int dim) : n(dim), g(static_cast<std::size_t>(dim) * dim * dim, Rational(0)) {}

  Rational& at(int a, int b, int c) { return g[(static_cast<std::size_t>(a) * n + b) * n + c]; }
  const Rational& at(int a, int b, int c) const { return g[(static_cast<std::size_t>(a) * n + b) * n + c]; }
};

/// Torsion components: Tor(E_a, E_b) = sum_c tor(a,b,c) E_c.
struct TorsionTensor {
  int n = 0;
  std::vector<Rational> t;

  TorsionTensor() = default;
  explicit TorsionTensor(int dim) : n(dim), t(static_cast<std::size_t>(dim) * dim * dim, Rational(0)) {}

  Rational& at(int a, int b, int c) { return t[(static_cast<std::size_t>(a) * n + b) * n + c]; }
  const Rational& at(int a, int b, int c) const { return t[(static_cast<std::size_t>(a) * n + b) * n + c]; }

  bool zero() const {
    for (const auto& v : t)
      if (!is_zero(v)) return false;
    return true;
  }
};

/// Covariant derivative of a constant-component tensor: the result has one
/// extra leading covariant slot holding the derivative direction.
inline Tensor cov_deriv_tensor(const ConnCoeffs& gamma, const Tensor& tau) {
  if (tau.rank() == 0) throw SignatureMismatch("cov_deriv_tensor: rank-0 tensor");
  int n = tau.n;
  std::vector<char> out_sig;
  out_sig.push_back('l');
  for (char s : tau.sig) {
    if (s != 'l' && s != 'u') throw SignatureMismatch("cov_deriv_tensor: bad variance tag");
    out_sig.push_back(s);
  }
  Tensor out(n, out_sig);
  int rk = tau.rank();
  std::vector<int> idx(static_cast<std::size_t>(rk), 0);
  std::size_t total = tau.data.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    // decode flat -> idx
    std::size_t rem = flat;
    for (int s = rk - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
    }
    for (int e = 0; e < n; ++e) {
      Rational v(0);
      for (int s = 0; s < rk; ++s) {
        int is = idx[static_cast<std::size_t>(s)];
        for (int p = 0; p < n; ++p) {
          std::size_t off = 0;
          for (int q = 0; q < rk; ++q)
            off = off * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(q == s ? p : idx[static_cast<std::size_t>(q)]);
          const Rational& tv = tau.data[off];
          if (is_zero(tv)) continue;
          if (tau.sig[static_cast<std::size_t>(s)] == 'l')
            v -= gamma.at(e, is, p) * tv;
          else
            v += gamma.at(e, p, is) * tv;
        }
      }
      out.data[static_cast<std::size_t>(e) * total + flat] = v;
    }
  }
  return out;
}

}  // namespace subrc
