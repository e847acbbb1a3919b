#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subrc/analysis.hpp"
#include "subrc/curvature.hpp"
#include "subrc/laurent.hpp"

namespace subrc {

/// Levi-Civita coefficients of the rescaled metrics g^lambda = g0 + mu*g1,
/// as Laurent polynomials in mu = lambda^2 over the fixed frame.
struct LCConn {
  int n = 0;
  std::vector<Laurent> g;

  LCConn() = default;
  explicit LCConn(int dim) : n(dim), g(static_cast<std::size_t>(dim) * dim * dim) {}

  Laurent& at(int a, int b, int c) { return g[(static_cast<std::size_t>(a) * n + b) * n + c]; }
  const Laurent& at(int a, int b, int c) const { return g[(static_cast<std::size_t>(a) * n + b) * n + c]; }
};

struct LaurentForm {
  int n = 0;
  std::vector<Laurent> m;

  LaurentForm() = default;
  explicit LaurentForm(int dim) : n(dim), m(static_cast<std::size_t>(dim) * dim) {}

  Laurent& at(int i, int j) { return m[static_cast<std::size_t>(i) * n + j]; }
  const Laurent& at(int i, int j) const { return m[static_cast<std::size_t>(i) * n + j]; }
};

inline int mu_weight(const GradedFrameSpec& f, int a) { return f.horizontal(a) ? 0 : 1; }

/// Koszul formula for the left-invariant metric g^lambda, solved exactly in
/// Laurent arithmetic: 2 g(nabla_a b, c) = g([a,b],c) - g([b,c],a) + g([c,a],b).
inline LCConn lc_koszul(const GradedFrameSpec& f) {
  GradedFrameSpec b = basic_grading(f);
  int n = b.dim();
  const StructureConstants& sc = b.sc();
  LCConn lc(n);
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c) {
        Laurent num;
        num.add_term(mu_weight(b, c), sc.c(a, bb, c));
        num.add_term(mu_weight(b, a), -sc.c(bb, c, a));
        num.add_term(mu_weight(b, bb), sc.c(c, a, bb));
        lc.at(a, bb, c) = (num * rat(1, 2)).shifted(-mu_weight(b, c));
      }
  return lc;
}

/// Levi-Civita at mu = 1 assembled from the basic connection and its torsion:
/// the contorsion combination <D(A,B),C> =
/// (<Tor(B,C),A> - <Tor(A,B),C> - <Tor(C,A),B>)/2, which is the four-case
/// comparison display written without grade masks.
inline LCConn lc_from_basic(const GradedFrameSpec& f, const ConnCoeffs& gamma,
                            const TorsionTensor& tor, const TorDerived&) {
  int n = f.dim();
  LCConn lc(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Rational v = gamma.at(a, b, c) +
                     (tor.at(b, c, a) - tor.at(a, b, c) + tor.at(a, c, b)) / 2;
        lc.at(a, b, c) = Laurent(v);
      }
  return lc;
}

/// Torsion-free and weighted metric-compatibility checks, as exact Laurent
/// identities.
inline bool lc_invariants_hold(const GradedFrameSpec& f, const LCConn& lc) {
  GradedFrameSpec b = basic_grading(f);
  int n = b.dim();
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c) {
        Laurent tf = lc.at(a, bb, c) - lc.at(bb, a, c) - Laurent(b.sc().c(a, bb, c));
        if (!tf.zero()) return false;
        Laurent mc = lc.at(a, bb, c).shifted(mu_weight(b, c)) +
                     lc.at(a, c, bb).shifted(mu_weight(b, bb));
        if (!mc.zero()) return false;
      }
  return true;
}

/// Curvature of a Laurent connection, same index conventions as the exact one.
inline std::vector<Laurent> curvature_laurent(const GradedFrameSpec& f, const LCConn& lc) {
  int n = f.dim();
  std::vector<Laurent> r(static_cast<std::size_t>(n) * n * n * n);
  auto at = [&](int a, int b, int c, int d) -> Laurent& {
    return r[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Laurent s;
          for (int e = 0; e < n; ++e) {
            s += lc.at(b, c, e) * lc.at(a, e, d);
            s -= lc.at(a, c, e) * lc.at(b, e, d);
            s -= Laurent(f.sc().c(a, b, e)) * lc.at(e, c, d);
          }
          at(a, b, c, d) = s;
        }
  return r;
}

/// Ricci of g^lambda in the fixed frame; the frame-weight factors cancel, so
/// entries are Laurent polynomials.
inline LaurentForm ricci_laurent(const GradedFrameSpec& f, const LCConn& lc) {
  int n = f.dim();
  std::vector<Laurent> r = curvature_laurent(f, lc);
  auto at = [&](int a, int b, int c, int d) -> const Laurent& {
    return r[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  };
  LaurentForm rc(n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      Laurent s;
      for (int a = 0; a < n; ++a) s += at(a, b, c, a);
      rc.at(b, c) = s;
    }
  return rc;
}

struct RescaledRicciReport {
  LaurentForm rc;                 // Koszul-side Ricci, any vertical rank
  bool comparison_available = false;  // the display comparison needs dim VM = 1
  bool rcfla_zero = false, rcflb_zero = false, rcflc_zero = false;
  bool strictly_normal = false;
  bool rcflsn_zero = false;
  std::vector<std::string> residuals;  // human-readable nonzero residuals
};

/// Rescaled Riemannian Ricci against the lambda-graded comparison displays.
inline RescaledRicciReport rescaled_ricci(const GradedFrameSpec& f) {
  CanonicalData d = canonical_data(f);
  const GradedFrameSpec& b = d.basic;
  int n = b.dim();
  RescaledRicciReport rep;
  rep.rc = ricci_laurent(b, lc_koszul(b));
  rep.strictly_normal = normality_flags(b).strictly_normal;
  if (b.v_dim() != 1) return rep;
  rep.comparison_available = true;

  int u = b.grade_indices(1)[0];
  std::vector<int> H = b.grade_indices(0);
  const Tensor& nt = d.td.nabla_tor;
  auto tor = [&](int a, int bb, int c) { return d.tor.at(a, bb, c); };

  auto j1dot = [&](int a, int z, int a2, int z2) {
    Rational s(0);
    for (int c = 0; c < n; ++c)
      s += j_out(b, d.tor, 1, a, z, c) * j_out(b, d.tor, 1, a2, z2, c);
    return s;
  };

  // horizontal-horizontal display
  rep.rcfla_zero = true;
  for (int y : H)
    for (int z : H) {
      Laurent rhs;
      Rational c0 = (d.rc.rc(y, z) + d.rc.rc(z, y)) / 2;
      c0 += (nt.at({z, u, y, u}) + nt.at({y, u, z, u})) / 2;
      c0 -= (d.td.tor2.at(y, z, u, u) + d.td.tor2.at(z, y, u, u)) / 2;
      rhs.add_term(0, c0);
      Rational c1(0);
      for (int i : H)
        for (int dd = 0; dd < n; ++dd) c1 += tor(i, y, dd) * tor(i, z, dd);
      rhs.add_term(1, -c1 / 2);
      Rational cm = (nt.at({u, y, u, z}) + nt.at({u, z, u, y})) / 2;
      for (int k : H) cm -= tor(y, u, k) * tor(z, u, k);
      for (int i : H)
        cm += j1dot(i, y, i, z) - (j1dot(i, i, y, z) + j1dot(i, i, z, y)) / 2;
      rhs.add_term(-1, cm);
      Laurent res = rep.rc.at(y, z) - rhs;
      if (!res.zero()) {
        rep.rcfla_zero = false;
        rep.residuals.push_back("RcFla(" + std::to_string(y + 1) + "," + std::to_string(z + 1) +
                                ") = " + res.str());
      }
    }

  // horizontal-vertical display
  rep.rcflb_zero = true;
  for (int y : H) {
    Laurent rhs;
    Rational c0(0);
    for (int i : H) c0 += nt.at({y, i, u, i}) - nt.at({i, y, u, i});
    rhs.add_term(0, c0);
    rhs.add_term(1, trace_nabla_tor(b, nt, y)[static_cast<std::size_t>(u)] / 2);
    Laurent res = rep.rc.at(y, u) - rhs;
    if (!res.zero()) {
      rep.rcflb_zero = false;
      rep.residuals.push_back("RcFlb(" + std::to_string(y + 1) + ") = " + res.str());
    }
  }

  // vertical-vertical display
  {
    Laurent rhs;
    Rational c0(0), c1(0), c2(0);
    for (int i : H) {
      c0 += nt.at({u, i, u, i});
      for (int k : H) c0 -= tor(i, u, k) * tor(i, u, k);
      c1 += nt.at({i, u, i, u}) - d.td.tor2.at(i, i, u, u);
      for (int k : H) c2 += tor(i, k, u) * tor(i, k, u);
    }
    rhs.add_term(0, c0);
    rhs.add_term(1, c1);
    rhs.add_term(2, c2 / 4);
    Laurent res = rep.rc.at(u, u) - rhs;
    rep.rcflc_zero = res.zero();
    if (!rep.rcflc_zero) rep.residuals.push_back("RcFlc = " + res.str());
  }

  // strictly normal reduction
  if (rep.strictly_normal) {
    rep.rcflsn_zero = true;
    for (int y : H)
      for (int z : H) {
        Laurent rhs;
        rhs.add_term(0, (d.rc.rc(y, z) + d.rc.rc(z, y)) / 2);
        Rational c1(0);
        for (int i : H)
          for (int dd = 0; dd < n; ++dd) c1 += tor(i, y, dd) * tor(i, z, dd);
        rhs.add_term(1, -c1 / 2);
        if (!(rep.rc.at(y, z) - rhs).zero()) rep.rcflsn_zero = false;
      }
    for (int y : H) {
      Laurent rhs;
      rhs.add_term(1, trace_nabla_tor(b, nt, y)[static_cast<std::size_t>(u)] / 2);
      if (!(rep.rc.at(y, u) - rhs).zero()) rep.rcflsn_zero = false;
    }
    Laurent rhs;
    Rational c2(0);
    for (int i : H)
      for (int k : H) c2 += tor(i, k, u) * tor(i, k, u);
    rhs.add_term(2, c2 / 4);
    if (!(rep.rc.at(u, u) - rhs).zero()) rep.rcflsn_zero = false;
  }
  return rep;
}

struct RmComparisonReport {
  bool xy_zero = true, xt_zero = true, xyt_zero = true;
  std::vector<std::string> residuals;
};

/// mu = 1 sectional-style comparisons between the Riemannian and canonical
/// curvature tensors.
inline RmComparisonReport rm_comparison_residuals(const GradedFrameSpec& f) {
  CanonicalData d = canonical_data(f);
  const GradedFrameSpec& b = d.basic;
  int n = b.dim();
  std::vector<Laurent> rl = curvature_laurent(b, lc_koszul(b));
  auto rm1 = [&](int a, int bb, int c, int dd) {
    // lowered at mu = 1, where all frame weights are 1
    return rl[((static_cast<std::size_t>(a) * n + bb) * n + c) * n + dd].eval(rat(1));
  };
  CurvTensor cv = curvature(b, d.gamma);
  const Tensor& nt = d.td.nabla_tor;
  auto j1dot = [&](int a, int z, int a2, int z2) {
    Rational s(0);
    for (int c = 0; c < n; ++c)
      s += j_out(b, d.tor, 1, a, z, c) * j_out(b, d.tor, 1, a2, z2, c);
    return s;
  };
  RmComparisonReport rep;
  std::vector<int> H = b.grade_indices(0);
  for (int x : H)
    for (int y : H) {
      Rational rhs = cv.rm.at(x, y, y, x);
      for (int dd = 0; dd < n; ++dd) rhs -= rat(3, 4) * d.tor.at(x, y, dd) * d.tor.at(x, y, dd);
      rhs -= j1dot(y, y, x, x);
      rhs += j1dot(x, y, x, y);
      Rational res = rm1(x, y, y, x) - rhs;
      if (!is_zero(res)) {
        rep.xy_zero = false;
        rep.residuals.push_back("XY(" + std::to_string(x + 1) + "," + std::to_string(y + 1) +
                                ") = " + to_string(res));
      }
    }
  for (int t = 0; t < n; ++t) {
    if (b.horizontal(t)) continue;
    for (int x : H) {
      Rational rhs = cv.rm.at(t, x, x, t);
      Rational j0sq(0);
      for (int k : H) j0sq += d.tor.at(x, k, t) * d.tor.at(x, k, t);
      rhs += j0sq / 4;
      rhs += nt.at({x, t, x, t}) - d.td.tor2.at(x, x, t, t);
      rhs += nt.at({t, x, t, x});
      for (int k : H) rhs -= d.tor.at(x, t, k) * d.tor.at(x, t, k);
      Rational res = rm1(t, x, x, t) - rhs;
      if (!is_zero(res)) {
        rep.xt_zero = false;
        rep.residuals.push_back("XT(" + std::to_string(x + 1) + "," + std::to_string(t + 1) +
                                ") = " + to_string(res));
      }
    }
    for (int x : H)
      for (int y : H) {
        Rational rhs = cv.rm.at(x, y, t, x);
        // printed display plus a second-order torsion term; the extra term
        // vanishes for 1-normal gradings and is forced by the Koszul oracle
        // on step-3 groups that are not 1-normal
        rhs += nt.at({x, y, x, t}) / 2;
        rhs -= d.td.tor2.at(x, x, y, t);
        rhs += nt.at({y, x, t, x}) - nt.at({x, y, t, x});
        Rational res = rm1(x, y, t, x) - rhs;
        if (!is_zero(res)) {
          rep.xyt_zero = false;
          rep.residuals.push_back("XYT(" + std::to_string(x + 1) + "," + std::to_string(y + 1) +
                                  "," + std::to_string(t + 1) + ") = " + to_string(res));
        }
      }
  }
  return rep;
}

/// Exact check of the limit identity recovering the Baudoin-Garofalo form
/// from the rescaled Ricci curvatures.
inline bool bg_limit_check(const GradedFrameSpec& f, int random_pairs = 20) {
  CanonicalData d = canonical_data(f);
  const GradedFrameSpec& b = d.basic;
  if (b.v_dim() != 1) throw VerticalRankNotOne();
  if (!normality_flags(b).strictly_normal) return false;
  int u = b.grade_indices(1)[0];
  int n = b.dim();
  LaurentForm rc = ricci_laurent(b, lc_koszul(b));
  std::vector<int> H = b.grade_indices(0);

  auto check_pair = [&](const std::vector<Rational>& y, const Rational& t) {
    Laurent q;
    for (int i : H)
      for (int j : H) q += rc.at(i, j) * (y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)]);
    for (int i : H) q += rc.at(i, u).shifted(-1) * (2 * t * y[static_cast<std::size_t>(i)]);
    q += rc.at(u, u).shifted(-2) * (t * t);
    std::vector<Rational> a(static_cast<std::size_t>(n), Rational(0));
    for (int i : H) a[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
    a[static_cast<std::size_t>(u)] = t;
    try {
      return q.limit0() == bg_quadratic(d, a);
    } catch (const NegativeExponentAtZero&) {
      return false;
    }
  };

  // spanning set: every frame pair, then random rational samples
  std::vector<Rational> zero(static_cast<std::size_t>(n), Rational(0));
  for (int i : H) {
    std::vector<Rational> y = zero;
    y[static_cast<std::size_t>(i)] = 1;
    if (!check_pair(y, Rational(0))) return false;
    if (!check_pair(y, Rational(1))) return false;
  }
  if (!check_pair(zero, Rational(1))) return false;
  Rng rng(4096);
  for (int s = 0; s < random_pairs; ++s) {
    std::vector<Rational> y = zero;
    for (int i : H) y[static_cast<std::size_t>(i)] = rng.next_rational();
    if (!check_pair(y, rng.next_rational())) return false;
  }
  return true;
}

struct RiemannMyersPoint {
  Rational mu;
  Rational c_lower, c_upper;  // bracket for the best uniform constant
  bool positive = false;
};

/// Searches the rescaled metrics for a uniform positive Ricci lower bound;
/// classical Myers then gives compactness.
inline Certificate riemann_myers_search(const GradedFrameSpec& f, const std::vector<Rational>& mu_grid,
                                        const Rational& tol = rat(1, 1000000)) {
  GradedFrameSpec b = basic_grading(f);
  if (b.v_dim() != 1) throw VerticalRankNotOne();
  int n = b.dim();
  LaurentForm rc = ricci_laurent(b, lc_koszul(b));

  Certificate cert;
  cert.kind = "riemann_myers";
  cert.hypotheses.emplace_back("vertical_rank_one", true);
  std::optional<RiemannMyersPoint> best;
  for (const Rational& mu : mu_grid) {
    if (mu <= 0) continue;
    SymForm R(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) R.at(i, j) = rc.at(i, j).eval(mu);
    if (!R.symmetric()) continue;  // never happens for Levi-Civita Ricci
    auto weight = [&](int i) { return b.horizontal(i) ? Rational(1) : mu; };
    auto feasible = [&](const Rational& c) {
      SymForm g = R;
      for (int i = 0; i < n; ++i) g.at(i, i) -= c * weight(i);
      return psd_check(g);
    };
    // pencil eigenvalues: spectrum of diag(w)^{-1} R, real by symmetry
    Mat<Rational> pencil(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pencil(i, j) = R.at(i, j) / weight(i);
    RiemannMyersPoint pt{mu, Rational(0), Rational(0), false};
    bool exact = false;
    for (const Rational& cand : rational_roots(charpoly(pencil)))
      if (feasible(cand) && !feasible(cand + tol)) {
        pt.c_lower = pt.c_upper = cand;
        exact = true;
        break;
      }
    if (!exact) {
      Rational hi = R.at(0, 0) / weight(0);
      for (int i = 1; i < n; ++i) hi = std::min(hi, Rational(R.at(i, i) / weight(i)));
      hi += 1;
      Rational lo = hi;
      while (!feasible(lo)) lo -= std::max(Rational(1), abs_rat(lo));
      while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        if (feasible(mid)) lo = mid; else hi = mid;
      }
      pt.c_lower = lo;
      pt.c_upper = hi;
    }
    pt.positive = pt.c_lower > 0;
    if (!best || pt.c_lower > best->c_lower) best = pt;
    if (pt.positive && cert.constants.find("mu") == cert.constants.end()) {
      cert.constants["mu"] = to_string(pt.mu);
      cert.constants["c"] = to_string(pt.c_lower);
    }
  }
  if (best) {
    cert.constants["best_mu"] = to_string(best->mu);
    cert.constants["best_c_lower"] = to_string(best->c_lower);
  }
  cert.compact = best && best->positive;
  if (!cert.compact) cert.note = "no grid point certifies a positive uniform bound";
  return cert;
}

inline std::vector<Rational> default_mu_grid() {
  std::vector<Rational> grid;
  Rational mu(1);
  for (int k = 0; k <= 20; ++k) {
    grid.push_back(mu);
    mu /= 2;
  }
  return grid;
}

}  // namespace subrc
