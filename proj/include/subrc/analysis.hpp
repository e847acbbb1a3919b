#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subrc/curvature.hpp"
#include "subrc/symform.hpp"

namespace subrc {

struct VerticalRankNotOne : std::runtime_error {
  VerticalRankNotOne() : std::runtime_error("operation requires dim VM = 1") {}
};

/// Everything the analysis layer needs from the algebraic modules, computed
/// once for the basic grading.
struct CanonicalData {
  GradedFrameSpec basic;
  ConnCoeffs gamma;
  TorsionTensor tor;
  TorDerived td;
  RicciData rc;
};

inline CanonicalData canonical_data(const GradedFrameSpec& f) {
  CanonicalData d{basic_grading(f), {}, {}, {}, {}};
  d.gamma = canonical_connection(d.basic);
  d.tor = torsion(d.basic, d.gamma);
  d.td = tor_derived(d.basic, d.gamma, d.tor);
  d.rc = ricci(d.basic, curvature(d.basic, d.gamma).rm);
  return d;
}

/// Raw quadratic form of the Baudoin-Garofalo tensor evaluated on a frame
/// coefficient vector.
inline Rational bg_quadratic(const CanonicalData& d, const std::vector<Rational>& a) {
  const GradedFrameSpec& f = d.basic;
  int n = f.dim();
  Rational q(0);
  std::vector<int> H = f.grade_indices(0);
  for (int i : H)
    for (int j : H)
      q += d.rc.rc(i, j) * a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)];
  for (int i : H) {
    if (is_zero(a[static_cast<std::size_t>(i)])) continue;
    std::vector<Rational> tr = trace_nabla_tor(f, d.td.nabla_tor, i);
    for (int dcomp = 0; dcomp < n; ++dcomp)
      q += a[static_cast<std::size_t>(i)] * tr[static_cast<std::size_t>(dcomp)] *
           a[static_cast<std::size_t>(dcomp)];
  }
  for (int i : H)
    for (int j : H) {
      Rational pairing(0);
      for (int dcomp = 0; dcomp < n; ++dcomp)
        pairing += d.tor.at(i, j, dcomp) * a[static_cast<std::size_t>(dcomp)];
      q += pairing * pairing / 4;
    }
  return q;
}

/// Polarizes the quadratic form into an exact symmetric matrix.
inline SymForm bg_form(const CanonicalData& d) {
  int n = d.basic.dim();
  SymForm g(n);
  std::vector<Rational> v(static_cast<std::size_t>(n), Rational(0));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = 1;
    g.at(i, i) = bg_quadratic(d, v);
    v[static_cast<std::size_t>(i)] = 0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<Rational> p(static_cast<std::size_t>(n), Rational(0)), m = p;
      p[static_cast<std::size_t>(i)] = 1; p[static_cast<std::size_t>(j)] = 1;
      m[static_cast<std::size_t>(i)] = 1; m[static_cast<std::size_t>(j)] = -1;
      Rational val = (bg_quadratic(d, p) - bg_quadratic(d, m)) / 4;
      g.at(i, j) = val;
      g.at(j, i) = val;
    }
  return g;
}

struct TorsionBound {
  int i = 0, j = 0, m = 0;
  Rational lower, upper;
  bool finite = true;  // constant structure constants always give finite bounds
  bool exact() const { return lower == upper; }
};

namespace detail {

/// Largest-eigenvalue bracket [lo, hi] with the exact value when rational.
inline std::pair<Rational, Rational> lambda_max_bracket(const SymForm& g, const Rational& tol) {
  if (auto ex = exact_max_eigenvalue(g)) return {*ex, *ex};
  Rational hi = max_eig_upper(g, tol);
  return {hi - tol, hi};
}

}  // namespace detail

/// kappa_ij^m = sup |Tor(X_i, X_j)_m|^2 over unit vectors of grades i and j.
/// Lower bound by alternating maximization (exact rational eigenvector steps
/// when available), upper bound by the smallest of the three flattening Gram
/// bounds.
inline TorsionBound torsion_bounds(const GradedFrameSpec& f, const TorsionTensor& tor, int gi,
                                   int gj, int gm, const Rational& tol) {
  if (tol <= 0) throw std::invalid_argument("torsion_bounds: tol must be positive");
  std::vector<int> I = f.grade_indices(gi), J = f.grade_indices(gj), M = f.grade_indices(gm);
  int ni = static_cast<int>(I.size()), nj = static_cast<int>(J.size()), nm = static_cast<int>(M.size());
  auto tval = [&](int p, int q, int r) {
    return tor.at(I[static_cast<std::size_t>(p)], J[static_cast<std::size_t>(q)], M[static_cast<std::size_t>(r)]);
  };

  TorsionBound out{gi, gj, gm, Rational(0), Rational(0), true};

  // Gram flattenings: over the first slot, the second slot, and the output.
  SymForm Gi(ni), Gj(nj), Gm(nm);
  for (int p = 0; p < ni; ++p)
    for (int p2 = 0; p2 < ni; ++p2) {
      Rational s(0);
      for (int q = 0; q < nj; ++q)
        for (int r = 0; r < nm; ++r) s += tval(p, q, r) * tval(p2, q, r);
      Gi.at(p, p2) = s;
    }
  for (int q = 0; q < nj; ++q)
    for (int q2 = 0; q2 < nj; ++q2) {
      Rational s(0);
      for (int p = 0; p < ni; ++p)
        for (int r = 0; r < nm; ++r) s += tval(p, q, r) * tval(p, q2, r);
      Gj.at(q, q2) = s;
    }
  for (int r = 0; r < nm; ++r)
    for (int r2 = 0; r2 < nm; ++r2) {
      Rational s(0);
      for (int p = 0; p < ni; ++p)
        for (int q = 0; q < nj; ++q) s += tval(p, q, r) * tval(p, q, r2);
      Gm.at(r, r2) = s;
    }
  Rational upper = detail::lambda_max_bracket(Gi, tol).second;
  upper = std::min(upper, detail::lambda_max_bracket(Gj, tol).second);
  upper = std::min(upper, detail::lambda_max_bracket(Gm, tol).second);
  out.upper = upper;

  // value of |T(u,v)|^2 / (|u|^2 |v|^2): attained on the unit spheres, and
  // rational without any normalization
  auto value = [&](const std::vector<Rational>& u, const std::vector<Rational>& v) {
    Rational nu(0), nv(0);
    for (const auto& x : u) nu += x * x;
    for (const auto& x : v) nv += x * x;
    if (is_zero(nu) || is_zero(nv)) return Rational(0);
    Rational s(0);
    for (int r = 0; r < nm; ++r) {
      Rational comp(0);
      for (int p = 0; p < ni; ++p)
        for (int q = 0; q < nj; ++q) comp += tval(p, q, r) * u[static_cast<std::size_t>(p)] * v[static_cast<std::size_t>(q)];
      s += comp * comp;
    }
    return Rational(s / (nu * nv));
  };

  // best v for fixed u: top eigenvector of A_u^T A_u when rational
  auto best_second = [&](const std::vector<Rational>& u) -> std::optional<std::vector<Rational>> {
    SymForm G(nj);
    for (int q = 0; q < nj; ++q)
      for (int q2 = 0; q2 < nj; ++q2) {
        Rational s(0);
        for (int r = 0; r < nm; ++r) {
          Rational x(0), y(0);
          for (int p = 0; p < ni; ++p) {
            x += tval(p, q, r) * u[static_cast<std::size_t>(p)];
            y += tval(p, q2, r) * u[static_cast<std::size_t>(p)];
          }
          s += x * y;
        }
        G.at(q, q2) = s;
      }
    auto lam = exact_max_eigenvalue(G);
    if (!lam) return std::nullopt;
    Mat<Rational> shifted(nj, nj);
    for (int a = 0; a < nj; ++a)
      for (int b = 0; b < nj; ++b) shifted(a, b) = G.at(a, b) - (a == b ? *lam : Rational(0));
    auto ns = nullspace(shifted);
    if (ns.empty()) return std::nullopt;
    return ns.front();
  };
  auto best_first = [&](const std::vector<Rational>& v) -> std::optional<std::vector<Rational>> {
    SymForm G(ni);
    for (int p = 0; p < ni; ++p)
      for (int p2 = 0; p2 < ni; ++p2) {
        Rational s(0);
        for (int r = 0; r < nm; ++r) {
          Rational x(0), y(0);
          for (int q = 0; q < nj; ++q) {
            x += tval(p, q, r) * v[static_cast<std::size_t>(q)];
            y += tval(p2, q, r) * v[static_cast<std::size_t>(q)];
          }
          s += x * y;
        }
        G.at(p, p2) = s;
      }
    auto lam = exact_max_eigenvalue(G);
    if (!lam) return std::nullopt;
    Mat<Rational> shifted(ni, ni);
    for (int a = 0; a < ni; ++a)
      for (int b = 0; b < ni; ++b) shifted(a, b) = G.at(a, b) - (a == b ? *lam : Rational(0));
    auto ns = nullspace(shifted);
    if (ns.empty()) return std::nullopt;
    return ns.front();
  };

  Rng rng(20240229);
  std::vector<std::vector<Rational>> starts;
  for (int p = 0; p < ni; ++p) {
    std::vector<Rational> e(static_cast<std::size_t>(ni), Rational(0));
    e[static_cast<std::size_t>(p)] = 1;
    starts.push_back(std::move(e));
  }
  for (int t = 0; t < 12; ++t) {
    std::vector<Rational> u(static_cast<std::size_t>(ni));
    for (auto& x : u) x = rng.next_rational(3, 2);
    starts.push_back(std::move(u));
  }
  for (auto u : starts) {
    for (int round = 0; round < 4; ++round) {
      auto v = best_second(u);
      if (!v) break;
      out.lower = std::max(out.lower, value(u, *v));
      auto u2 = best_first(*v);
      if (!u2) break;
      out.lower = std::max(out.lower, value(*u2, *v));
      u = *u2;
    }
  }
  if (out.lower > out.upper) out.upper = out.lower;  // exact lower beats a bracketed upper
  return out;
}

/// Feasibility of the curvature-dimension inequality R >= rho1 on H + rho2 on V.
inline bool cd_feasible(const GradedFrameSpec& f, const SymForm& bg, const Rational& rho1,
                        const Rational& rho2) {
  SymForm g = bg;
  for (int i = 0; i < f.dim(); ++i) g.at(i, i) -= f.horizontal(i) ? rho1 : rho2;
  return psd_check(g);
}

/// True when some rho2 > 0 keeps the inequality feasible at the given rho1:
/// the shifted form must be psd with a kernel free of vertical components.
inline bool cd_feasible_some_positive_rho2(const GradedFrameSpec& f, const SymForm& bg,
                                           const Rational& rho1) {
  SymForm g = bg;
  for (int i : f.grade_indices(0)) g.at(i, i) -= rho1;
  if (!psd_check(g)) return false;
  auto kernel = nullspace(g.as_mat());
  for (const auto& v : kernel)
    for (int i = 0; i < f.dim(); ++i)
      if (!f.horizontal(i) && !is_zero(v[static_cast<std::size_t>(i)])) return false;
  return true;
}

struct FrontierPoint {
  Rational rho1;
  bool feasible = false;       // some rho2 >= 0 exists at this rho1
  Rational rho2_lo, rho2_hi;   // bracket for the supremal rho2 when feasible
};

/// Supremal rho2 bracket at fixed rho1 (requires feasibility at rho2 = 0).
inline std::optional<std::pair<Rational, Rational>> rho2_max_bracket(const GradedFrameSpec& f,
                                                                     const SymForm& bg,
                                                                     const Rational& rho1,
                                                                     const Rational& tol) {
  if (!cd_feasible(f, bg, rho1, Rational(0))) return std::nullopt;
  SymForm g = bg;
  for (int i : f.grade_indices(0)) g.at(i, i) -= rho1;
  // candidates: exact eigenvalues of the vertical block
  std::vector<int> V;
  for (int i = 0; i < f.dim(); ++i)
    if (!f.horizontal(i)) V.push_back(i);
  SymForm vb(static_cast<int>(V.size()));
  for (std::size_t a = 0; a < V.size(); ++a)
    for (std::size_t b = 0; b < V.size(); ++b) vb.at(static_cast<int>(a), static_cast<int>(b)) = g.at(V[a], V[b]);
  for (const Rational& cand : rational_eigenvalues(vb))
    if (cand >= 0 && cd_feasible(f, bg, rho1, cand) && !cd_feasible(f, bg, rho1, cand + tol))
      return std::make_pair(cand, cand);
  Rational lo(0), hi(1);
  while (cd_feasible(f, bg, rho1, hi)) { lo = hi; hi *= 2; }
  while (hi - lo > tol) {
    Rational mid = (lo + hi) / 2;
    if (cd_feasible(f, bg, rho1, mid)) lo = mid; else hi = mid;
  }
  return std::make_pair(lo, hi);
}

inline std::vector<FrontierPoint> cd_frontier(const GradedFrameSpec& f, const SymForm& bg,
                                              const std::vector<Rational>& rho1_grid,
                                              const Rational& tol) {
  std::vector<FrontierPoint> out;
  for (const Rational& r1 : rho1_grid) {
    FrontierPoint pt{r1, false, Rational(0), Rational(0)};
    if (auto br = rho2_max_bracket(f, bg, r1, tol)) {
      pt.feasible = true;
      pt.rho2_lo = br->first;
      pt.rho2_hi = br->second;
    }
    out.push_back(pt);
  }
  return out;
}

struct Certificate {
  std::string kind;  // myers_bm2 | riemann_myers | bad_bonnet
  std::vector<std::pair<std::string, bool>> hypotheses;
  std::map<std::string, std::string> constants;
  bool compact = false;  // verdict: compact vs inconclusive
  std::string note;
  bool hypotheses_pass() const {
    for (const auto& [k, v] : hypotheses)
      if (!v) return false;
    return true;
  }
};

/// Largest rho1 admitting some rho2 > 0, as a certified bracket; the exact
/// value when it is a rational eigenvalue-style candidate.
inline std::optional<std::pair<Rational, Rational>> rho1_max_bracket(const GradedFrameSpec& f,
                                                                     const SymForm& bg,
                                                                     const Rational& tol) {
  // candidate exact values: rational eigenvalues of the horizontal block and
  // of the full form, plus zero
  std::vector<Rational> candidates{Rational(0)};
  std::vector<int> H = f.grade_indices(0);
  SymForm hb(static_cast<int>(H.size()));
  for (std::size_t a = 0; a < H.size(); ++a)
    for (std::size_t b = 0; b < H.size(); ++b) hb.at(static_cast<int>(a), static_cast<int>(b)) = bg.at(H[a], H[b]);
  for (const Rational& r : rational_eigenvalues(hb)) candidates.push_back(r);
  for (const Rational& r : rational_eigenvalues(bg)) candidates.push_back(r);
  std::sort(candidates.begin(), candidates.end());
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it)
    if (cd_feasible_some_positive_rho2(f, bg, *it) &&
        !cd_feasible_some_positive_rho2(f, bg, *it + tol))
      return std::make_pair(*it, *it);

  Rational lo = bg.at(H[0], H[0]);
  for (int i : H) lo = std::min(lo, bg.at(i, i));
  lo -= Rational(f.dim());  // generous start below any feasible shift
  if (!cd_feasible_some_positive_rho2(f, bg, lo)) return std::nullopt;
  Rational hi(1);
  while (cd_feasible_some_positive_rho2(f, bg, hi)) hi *= 2;
  while (hi - lo > tol) {
    Rational mid = (lo + hi) / 2;
    if (cd_feasible_some_positive_rho2(f, bg, mid)) lo = mid; else hi = mid;
  }
  return std::make_pair(lo, hi);
}

/// Myers-type compactness certificate through the generalized
/// curvature-dimension inequality for the basic grading.
inline Certificate myers_certificate(const GradedFrameSpec& f, const Rational& tol = rat(1, 1000000)) {
  CanonicalData d = canonical_data(f);
  NormalityFlags nf = normality_flags(d.basic);
  GradingReport gr = validate_grading(d.basic);
  TorsionBound k001 = torsion_bounds(d.basic, d.tor, 0, 0, 1, tol);

  Certificate cert;
  cert.kind = "myers_bm2";
  cert.hypotheses.emplace_back("strictly_normal_basic_grading", nf.strictly_normal);
  cert.hypotheses.emplace_back("vm_integrable", gr.vm_integrable);
  cert.hypotheses.emplace_back("kappa_00_1_finite", k001.finite);
  cert.constants["kappa00_1_lower"] = to_string(k001.lower);
  cert.constants["kappa00_1_upper"] = to_string(k001.upper);
  if (k001.exact()) cert.constants["kappa00_1"] = to_string(k001.lower);
  Rational kappa = Rational(f.ranks()[0]) * k001.upper;
  cert.constants["kappa"] = to_string(kappa);
  if (!cert.hypotheses_pass()) {
    cert.note = "hypotheses not met";
    return cert;
  }
  SymForm bg = bg_form(d);
  auto r1 = rho1_max_bracket(d.basic, bg, tol);
  if (!r1) {
    cert.note = "no rho1 with positive rho2 exists";
    return cert;
  }
  cert.constants["rho1_max_lower"] = to_string(r1->first);
  cert.constants["rho1_max_upper"] = to_string(r1->second);
  Rational rho1 = r1->first;  // certified feasible value
  if (rho1 > 0) {
    auto r2 = rho2_max_bracket(d.basic, bg, rho1, tol);
    cert.compact = true;
    cert.constants["rho1"] = to_string(rho1);
    cert.constants["rho2"] = to_string(r2->first);
  } else {
    cert.constants["rho1"] = to_string(rho1);
    auto r2 = rho2_max_bracket(d.basic, bg, rho1, tol);
    if (r2) cert.constants["rho2"] = to_string(r2->first);
    cert.note = "best certified rho1 is not positive";
  }
  return cert;
}

/// Bonnet-type certificate from the torsion tensors B and K (rank-one
/// vertical bundle only).
inline Certificate bad_bonnet(const GradedFrameSpec& f, const Rational& tol = rat(1, 1000000)) {
  CanonicalData d = canonical_data(f);
  if (d.basic.v_dim() != 1) throw VerticalRankNotOne();
  int u = d.basic.grade_indices(1)[0];
  std::vector<int> H = d.basic.grade_indices(0);
  int nh = static_cast<int>(H.size());
  int n = d.basic.dim();

  // B(X,Y) = <(nabla_U Tor)(X,U), Y> - <Tor(X,U)_0, Tor(Y,U)_0>
  SymForm B(nh), K(nh);
  for (int x = 0; x < nh; ++x)
    for (int y = 0; y < nh; ++y) {
      Rational s = d.td.nabla_tor.at({u, H[static_cast<std::size_t>(x)], u, H[static_cast<std::size_t>(y)]});
      for (int k : H)
        s -= d.tor.at(H[static_cast<std::size_t>(x)], u, k) * d.tor.at(H[static_cast<std::size_t>(y)], u, k);
      B.at(x, y) = s;
    }
  // symmetrize (the display is used as a quadratic form)
  for (int x = 0; x < nh; ++x)
    for (int y = x + 1; y < nh; ++y) {
      Rational s = (B.at(x, y) + B.at(y, x)) / 2;
      B.at(x, y) = s;
      B.at(y, x) = s;
    }
  // K(X,Y) = sum_i ( <J1(E_i,X), J1(E_i,Y)> - <J1(E_i,E_i), J1(X,Y)> ),
  // J with output projected to the vertical grade
  auto j1dot = [&](int a, int z, int b, int z2) {
    Rational s(0);
    for (int c = 0; c < n; ++c)
      s += j_out(d.basic, d.tor, 1, a, z, c) * j_out(d.basic, d.tor, 1, b, z2, c);
    return s;
  };
  for (int x = 0; x < nh; ++x)
    for (int y = 0; y < nh; ++y) {
      Rational s(0);
      for (int i : H)
        s += j1dot(i, H[static_cast<std::size_t>(x)], i, H[static_cast<std::size_t>(y)]) -
             j1dot(i, i, H[static_cast<std::size_t>(x)], H[static_cast<std::size_t>(y)]);
      K.at(x, y) = s;
    }

  Certificate cert;
  cert.kind = "bad_bonnet";
  cert.hypotheses.emplace_back("vertical_rank_one", true);
  cert.hypotheses.emplace_back("bounded_curvature_torsion", true);  // automatic: constant structure
  Rational a(0);
  for (int x = 0; x < nh; ++x) a += B.at(x, x);
  cert.constants["a"] = to_string(a);
  SymForm BK(nh);
  for (int x = 0; x < nh; ++x)
    for (int y = 0; y < nh; ++y) BK.at(x, y) = B.at(x, y) + K.at(x, y);
  auto [blo, bhi] = min_eig_bounds(BK, tol);
  cert.constants["b_lower"] = to_string(blo);
  cert.constants["b_upper"] = to_string(bhi);
  cert.compact = (a > 0) && (blo > 0);
  if (!cert.compact) cert.note = "tr B or min-eig(B+K) not certified positive";
  return cert;
}

}  // namespace subrc
