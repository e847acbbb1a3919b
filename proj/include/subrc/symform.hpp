#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "subrc/linalg.hpp"
#include "subrc/rational.hpp"

namespace subrc {

/// Symmetric bilinear form with exact rational entries.
struct SymForm {
  int dim = 0;
  std::vector<Rational> m;  // row-major dim*dim

  SymForm() = default;
  explicit SymForm(int n) : dim(n), m(static_cast<std::size_t>(n) * n, Rational(0)) {}

  Rational& at(int i, int j) { return m[static_cast<std::size_t>(i) * dim + j]; }
  const Rational& at(int i, int j) const { return m[static_cast<std::size_t>(i) * dim + j]; }

  bool symmetric() const {
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        if (at(i, j) != at(j, i)) return false;
    return true;
  }

  Mat<Rational> as_mat() const {
    Mat<Rational> a(dim, dim);
    a.a = m;
    return a;
  }
};

/// Characteristic polynomial det(lambda*I - A) as coefficients
/// [c_0, ..., c_{n-1}, 1] of ascending powers, via Faddeev-LeVerrier.
inline std::vector<Rational> charpoly(const Mat<Rational>& A) {
  int n = A.rows;
  std::vector<Rational> coeff(static_cast<std::size_t>(n) + 1, Rational(0));
  coeff[static_cast<std::size_t>(n)] = 1;
  Mat<Rational> M(n, n);  // M_0 = I so that M_1 = A
  for (int i = 0; i < n; ++i) M(i, i) = 1;
  Rational c(0);
  for (int k = 1; k <= n; ++k) {
    // M_k = A (M_{k-1} + c_{k-1} I)
    Mat<Rational> tmp = M;
    for (int i = 0; i < n; ++i) tmp(i, i) += c;
    Mat<Rational> Mk(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rational s(0);
        for (int l = 0; l < n; ++l) s += A(i, l) * tmp(l, j);
        Mk(i, j) = s;
      }
    M = Mk;
    Rational tr(0);
    for (int i = 0; i < n; ++i) tr += M(i, i);
    c = -tr / k;
    coeff[static_cast<std::size_t>(n - k)] = c;
  }
  return coeff;
}

/// Exact positive-semidefiniteness test for a symmetric form: with real
/// eigenvalues, lambda_i >= 0 for all i iff every elementary symmetric
/// function e_k = (-1)^k c_{n-k} is >= 0.
inline bool psd_check(const SymForm& g) {
  if (!g.symmetric()) throw std::invalid_argument("psd_check: form not symmetric");
  std::vector<Rational> c = charpoly(g.as_mat());
  int n = g.dim;
  for (int k = 1; k <= n; ++k) {
    Rational ek = (k % 2 == 0) ? c[static_cast<std::size_t>(n - k)] : Rational(-c[static_cast<std::size_t>(n - k)]);
    if (ek < 0) return false;
  }
  return true;
}

inline SymForm shift_diag(const SymForm& g, const Rational& s) {
  SymForm h = g;
  for (int i = 0; i < g.dim; ++i) h.at(i, i) -= s;
  return h;
}

/// Certified rational bracket [lower, upper] containing the minimum
/// eigenvalue, width <= tol, by exact psd bisection on shifts.
inline std::pair<Rational, Rational> min_eig_bounds(const SymForm& g, const Rational& tol) {
  if (tol <= 0) throw std::invalid_argument("min_eig_bounds: tol must be positive");
  int n = g.dim;
  Rational hi = g.at(0, 0);
  for (int i = 1; i < n; ++i) hi = std::min(hi, g.at(i, i));
  if (psd_check(shift_diag(g, hi))) return {hi, hi};  // min eigenvalue hit exactly
  Rational lo = hi;
  for (int i = 0; i < n; ++i) {
    Rational row = g.at(i, i);
    for (int j = 0; j < n; ++j)
      if (j != i) row -= abs_rat(g.at(i, j));
    lo = std::min(lo, row);  // Gershgorin
  }
  while (hi - lo > tol) {
    Rational mid = (lo + hi) / 2;
    if (psd_check(shift_diag(g, mid)))
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

/// Certified rational upper bound for the maximum eigenvalue, gap <= tol.
inline Rational max_eig_upper(const SymForm& g, const Rational& tol) {
  SymForm neg(g.dim);
  for (std::size_t i = 0; i < g.m.size(); ++i) neg.m[i] = -g.m[i];
  auto [lo, hi] = min_eig_bounds(neg, tol);
  return -lo;
}

inline std::vector<long> small_divisors(long v) {
  std::vector<long> d;
  v = v < 0 ? -v : v;
  for (long i = 1; i * i <= v; ++i) {
    if (v % i == 0) {
      d.push_back(i);
      if (i != v / i) d.push_back(v / i);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

/// All rational roots of the (rational-coefficient, monic-after-clearing)
/// polynomial, with multiplicity collapsed; empty when coefficients are too
/// large to factor cheaply. Ascending coefficients.
inline std::vector<Rational> rational_roots(std::vector<Rational> coeff) {
  std::vector<Rational> roots;
  // strip trailing zero coefficients = roots at 0
  std::size_t low = 0;
  while (low + 1 < coeff.size() && is_zero(coeff[low])) ++low;
  if (low > 0) {
    roots.push_back(Rational(0));
    coeff.erase(coeff.begin(), coeff.begin() + static_cast<long>(low));
  }
  if (coeff.size() <= 1) return roots;
  mpz_class scale(1);  // lcm of denominators
  for (const auto& c : coeff) {
    mpz_class d = c.get_den();
    scale = scale / gcd(scale, d) * d;
  }
  std::vector<mpz_class> ic;
  for (const auto& c : coeff) ic.push_back(mpz_class(c.get_num() * (scale / c.get_den())));
  mpz_class a0 = ic.front(), an = ic.back();
  if (a0 == 0 || abs(a0) > 1000000000000L || abs(an) > 1000000000000L) return roots;
  auto eval = [&](const Rational& x) {
    Rational v(0);
    for (std::size_t k = ic.size(); k-- > 0;) v = v * x + Rational(ic[k]);
    return v;
  };
  for (long p : small_divisors(a0.get_si()))
    for (long q : small_divisors(an.get_si()))
      for (int s : {1, -1}) {
        Rational cand = rat(s * p, q);
        if (is_zero(eval(cand)) &&
            std::find(roots.begin(), roots.end(), cand) == roots.end())
          roots.push_back(cand);
      }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Exact rational eigenvalues of a symmetric form (only those that are
/// rational; a form may have none).
inline std::vector<Rational> rational_eigenvalues(const SymForm& g) {
  return rational_roots(charpoly(g.as_mat()));
}

/// Exact smallest eigenvalue when it is rational and certifiable: the least
/// rational root r with psd(g - r I).
inline std::optional<Rational> exact_min_eigenvalue(const SymForm& g) {
  for (const Rational& r : rational_eigenvalues(g))
    if (psd_check(shift_diag(g, r))) return r;
  return std::nullopt;
}

/// Exact largest eigenvalue when rational: greatest rational root r with
/// psd(r I - g).
inline std::optional<Rational> exact_max_eigenvalue(const SymForm& g) {
  std::vector<Rational> roots = rational_eigenvalues(g);
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    SymForm h(g.dim);
    for (int i = 0; i < g.dim; ++i)
      for (int j = 0; j < g.dim; ++j) h.at(i, j) = (i == j ? *it : Rational(0)) - g.at(i, j);
    if (psd_check(h)) return *it;
  }
  return std::nullopt;
}

}  // namespace subrc
