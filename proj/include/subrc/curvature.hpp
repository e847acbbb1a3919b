#pragma once

#include <string>
#include <vector>

#include "subrc/connection.hpp"
#include "subrc/frame.hpp"
#include "subrc/symform.hpp"
#include "subrc/tensor.hpp"

namespace subrc {

struct Rank4 {
  int n = 0;
  std::vector<Rational> v;

  Rank4() = default;
  explicit Rank4(int dim)
      : n(dim), v(static_cast<std::size_t>(dim) * dim * dim * dim, Rational(0)) {}

  Rational& at(int a, int b, int c, int d) {
    return v[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  }
  const Rational& at(int a, int b, int c, int d) const {
    return v[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  }
  bool zero() const {
    for (const auto& x : v)
      if (!is_zero(x)) return false;
    return true;
  }
};

/// R(E_a,E_b)E_c = sum_d r(a,b,c,d) E_d; rm is the lowering by the (identity)
/// frame metric.
struct CurvTensor {
  Rank4 r;
  Rank4 rm;
};

inline CurvTensor curvature(const GradedFrameSpec& f, const ConnCoeffs& gamma) {
  int n = f.dim();
  CurvTensor cv{Rank4(n), Rank4(n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Rational s(0);
          for (int e = 0; e < n; ++e)
            s += gamma.at(b, c, e) * gamma.at(a, e, d) - gamma.at(a, c, e) * gamma.at(b, e, d) -
                 f.sc().c(a, b, e) * gamma.at(e, c, d);
          cv.r.at(a, b, c, d) = s;
        }
  cv.rm = cv.r;  // orthonormal frame: lowering is the identity
  return cv;
}

struct FlatnessFlags {
  bool horizontally_flat = false;
  bool vertically_flat = false;
  bool flat = false;
};

inline FlatnessFlags flatness_flags(const GradedFrameSpec& f, const Rank4& rm) {
  FlatnessFlags out;
  int n = f.dim();
  out.horizontally_flat = out.vertically_flat = out.flat = true;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (is_zero(rm.at(a, b, c, d))) continue;
          out.flat = false;
          if (f.horizontal(c)) out.horizontally_flat = false;
          if (!f.horizontal(c)) out.vertically_flat = false;
        }
  return out;
}

/// Cyclic sum over the first three arguments of a 3-slot map. Materializes
/// each term so lazy gmp expression templates never outlive their operands.
template <class F>
Rational cyclic3(F&& fn, int a, int b, int c) {
  Rational s(fn(a, b, c));
  s += Rational(fn(b, c, a));
  s += Rational(fn(c, a, b));
  return s;
}

struct SymmetryReport {
  bool cd_antisymmetric = true;   // Rm(A,B,C,D) = -Rm(A,B,D,C)
  bool ab_antisymmetric = true;   // Rm(A,B,C,D) = -Rm(B,A,C,D)
  bool mixed_hv_vanishes = true;  // Rm(TM,TM,HM,VM) = 0
  bool ok() const { return cd_antisymmetric && ab_antisymmetric && mixed_hv_vanishes; }
};

inline SymmetryReport symmetry_residuals(const GradedFrameSpec& f, const Rank4& rm) {
  SymmetryReport rep;
  int n = f.dim();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (!is_zero(rm.at(a, b, c, d) + rm.at(a, b, d, c))) rep.cd_antisymmetric = false;
          if (!is_zero(rm.at(a, b, c, d) + rm.at(b, a, c, d))) rep.ab_antisymmetric = false;
          if (f.horizontal(c) && !f.horizontal(d) && !is_zero(rm.at(a, b, c, d)))
            rep.mixed_hv_vanishes = false;
        }
  return rep;
}

/// Second-order torsion, covariant torsion derivative and the J operators of
/// the torsion (the literal argument-projection reading).
struct TorDerived {
  Tensor nabla_tor;  // [e][a][b][d] = ((nabla_{E_e} Tor)(E_a,E_b))^d
  Rank4 tor2;        // [a][b][c][d] = (Tor(E_a, Tor(E_b,E_c)))^d
  Tensor j0, j1;     // [a][b][c] = <J^m(E_a,E_b), E_c> = <Tor(E_a,E_c), (E_b)_m>
};

inline TorDerived tor_derived(const GradedFrameSpec& f, const ConnCoeffs& gamma,
                              const TorsionTensor& tor) {
  int n = f.dim();
  TorDerived out;
  out.nabla_tor = cov_deriv_tensor(gamma, torsion_as_tensor(tor));
  out.tor2 = Rank4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Rational s(0);
          for (int e = 0; e < n; ++e) s += tor.at(b, c, e) * tor.at(a, e, d);
          out.tor2.at(a, b, c, d) = s;
        }
  out.j0 = Tensor(n, {'l', 'l', 'u'});
  out.j1 = Tensor(n, {'l', 'l', 'u'});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        if (f.grade(b) == 0) out.j0.at({a, b, c}) = tor.at(a, c, b);
        if (f.grade(b) == 1) out.j1.at({a, b, c}) = tor.at(a, c, b);
      }
  return out;
}

/// <J(E_a, E_z), E_c> = <Tor(E_a, E_c), E_z>, with the output projected to
/// grade m. This is the J-operator convention of the Riemannian-comparison
/// formulas.
inline Rational j_out(const GradedFrameSpec& f, const TorsionTensor& tor, int m, int a, int z, int c) {
  if (f.grade(c) != m) return Rational(0);
  return tor.at(a, c, z);
}

struct ConditionalCheck {
  bool hypothesis_met = false;
  bool holds = false;  // always evaluated, even when the hypothesis fails
};

struct AlgebraicBianchiReport {
  bool unconditional_zero = true;  // cyc R + cyc TOR2 - cyc (nabla Tor) = 0
  std::vector<ConditionalCheck> part_a;  // per grade j: cyc(nabla Tor) on Vj triples stays in the complement
  std::vector<ConditionalCheck> part_b;  // per grade j, needs j-normal
  std::vector<ConditionalCheck> part_c;  // per grade j, needs j-normal + integrable complement
};

inline AlgebraicBianchiReport algebraic_bianchi_residual(const GradedFrameSpec& f,
                                                         const ConnCoeffs& gamma) {
  int n = f.dim(), r = f.r();
  TorsionTensor tor = torsion(f, gamma);
  TorDerived td = tor_derived(f, gamma, tor);
  CurvTensor cv = curvature(f, gamma);
  AlgebraicBianchiReport rep;
  auto term = [&](int a, int b, int c, int d) -> Rational {
    return cv.r.at(a, b, c, d) + td.tor2.at(a, b, c, d) - td.nabla_tor.at({c, a, b, d});
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          if (!is_zero(cyclic3([&](int x, int y, int z) { return term(x, y, z, d); }, a, b, c)))
            rep.unconditional_zero = false;

  NormalityFlags nf = normality_flags(f);
  for (int j = 0; j <= r; ++j) {
    ConditionalCheck pa{true, true}, pb{nf.j_normal[static_cast<std::size_t>(j)], true};
    bool comp_integrable = true;  // complement of Vj closed under brackets
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (f.grade(a) == j || f.grade(b) == j) continue;
        for (int k : f.grade_indices(j))
          if (!is_zero(f.sc().c(a, b, k))) comp_integrable = false;
      }
    ConditionalCheck pc{nf.j_normal[static_cast<std::size_t>(j)] && comp_integrable, true};
    std::vector<int> vj = f.grade_indices(j);
    for (int a : vj)
      for (int b : vj) {
        for (int c : vj)
          for (int d : vj) {
            if (!is_zero(cyclic3(
                    [&](int x, int y, int z) { return td.nabla_tor.at({z, x, y, d}); }, a, b, c)))
              pa.holds = false;
            if (!is_zero(cyclic3([&](int x, int y, int z) { return td.tor2.at(x, y, z, d); }, a, b,
                                 c)))
              pb.holds = false;
          }
        for (int c = 0; c < n; ++c)
          for (int d : vj)
            if (!is_zero(cyclic3([&](int x, int y, int z) { return td.tor2.at(x, y, z, d); }, a, b,
                                 c)))
              pc.holds = false;
      }
    rep.part_a.push_back(pa);
    rep.part_b.push_back(pb);
    rep.part_c.push_back(pc);
  }
  return rep;
}

struct PairSymmetryReport {
  ConditionalCheck horizontal_quadruples;    // needs VM normal (0-normal)
  ConditionalCheck three_horizontal;         // needs VM normal + integrable
  ConditionalCheck cyclic_r_horizontal;      // <cyc R(X,Y)Z, W> = 0, same hypotheses
};

inline PairSymmetryReport pair_symmetry_checks(const GradedFrameSpec& f, const ConnCoeffs& gamma) {
  int n = f.dim();
  CurvTensor cv = curvature(f, gamma);
  NormalityFlags nf = normality_flags(f);
  GradingReport gr = validate_grading(f);
  PairSymmetryReport rep;
  rep.horizontal_quadruples = {nf.j_normal[0], true};
  rep.three_horizontal = {nf.j_normal[0] && gr.vm_integrable, true};
  rep.cyclic_r_horizontal = {nf.j_normal[0], true};
  auto pair_sym = [&](int a, int b, int c, int d) {
    return is_zero(cv.rm.at(a, b, c, d) - cv.rm.at(c, d, a, b));
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          int horiz = (f.horizontal(a) ? 1 : 0) + (f.horizontal(b) ? 1 : 0) +
                      (f.horizontal(c) ? 1 : 0) + (f.horizontal(d) ? 1 : 0);
          if (horiz == 4) {
            if (!pair_sym(a, b, c, d)) rep.horizontal_quadruples.holds = false;
            Rational cyc = cyclic3(
                [&](int x, int y, int z) { return cv.r.at(x, y, z, d); }, a, b, c);
            if (!is_zero(cyc)) rep.cyclic_r_horizontal.holds = false;
          }
          if (horiz >= 3 && !pair_sym(a, b, c, d)) rep.three_horizontal.holds = false;
        }
  return rep;
}

struct DifferentialBianchiReport {
  bool first_identity_zero = true;          // unconditional
  ConditionalCheck second_identity;         // needs VM normal + integrable, horizontal indices
};

inline DifferentialBianchiReport differential_bianchi_residual(const GradedFrameSpec& f,
                                                               const ConnCoeffs& gamma) {
  int n = f.dim();
  CurvTensor cv = curvature(f, gamma);
  TorsionTensor tor = torsion(f, gamma);
  Tensor rt(n, {'l', 'l', 'l', 'u'});
  rt.data = cv.r.v;
  Tensor nabla_r = cov_deriv_tensor(gamma, rt);
  DifferentialBianchiReport rep;
  auto first_term = [&](int w, int x, int y, int z, int d) {
    Rational s = nabla_r.at({w, x, y, z, d});
    for (int e = 0; e < n; ++e) s -= tor.at(x, w, e) * cv.r.at(e, y, z, d);
    return s;
  };
  for (int w = 0; w < n && rep.first_identity_zero; ++w)
    for (int x = 0; x < n && rep.first_identity_zero; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          for (int d = 0; d < n; ++d) {
            Rational s = first_term(w, x, y, z, d) + first_term(x, y, w, z, d) +
                         first_term(y, w, x, z, d);
            if (!is_zero(s)) { rep.first_identity_zero = false; break; }
          }

  NormalityFlags nf = normality_flags(f);
  GradingReport gr = validate_grading(f);
  rep.second_identity = {nf.j_normal[0] && gr.vm_integrable, true};
  Tensor rmt(n, {'l', 'l', 'l', 'l'});
  rmt.data = cv.rm.v;
  Tensor nabla_rm = cov_deriv_tensor(gamma, rmt);
  std::vector<int> H = f.grade_indices(0);
  for (int x : H)
    for (int y : H)
      for (int z : H)
        for (int w : H)
          for (int v : H) {
            Rational s = nabla_rm.at({v, x, y, z, w}) + nabla_rm.at({z, x, y, w, v}) +
                         nabla_rm.at({w, x, y, v, z});
            if (!is_zero(s)) rep.second_identity.holds = false;
          }
  return rep;
}

/// Subriemannian Ricci: Rc(A,B) = sum_k Rm(A, X_k, X_k, B) over a horizontal
/// frame; s0 is its horizontal trace.
struct RicciData {
  Mat<Rational> rc;
  Rational s0;
};

inline RicciData ricci(const GradedFrameSpec& f, const Rank4& rm) {
  int n = f.dim();
  RicciData out{Mat<Rational>(n, n), Rational(0)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Rational s(0);
      for (int k : f.grade_indices(0)) s += rm.at(a, k, k, b);
      out.rc(a, b) = s;
    }
  for (int k : f.grade_indices(0)) out.s0 += out.rc(k, k);
  return out;
}

struct RicciReport {
  ConditionalCheck horizontal_symmetry;     // needs VM normal
  ConditionalCheck vertical_row_vanishes;   // Rc(VM,HM) = 0; needs VM normal + integrable
  ConditionalCheck contracted_bianchi;      // nabla_X S0 = 2 tr (nabla Rc); same hypotheses
};

inline RicciReport ricci_checks(const GradedFrameSpec& f, const ConnCoeffs& gamma,
                                const RicciData& rd) {
  int n = f.dim();
  NormalityFlags nf = normality_flags(f);
  GradingReport gr = validate_grading(f);
  RicciReport rep;
  rep.horizontal_symmetry = {nf.j_normal[0], true};
  rep.vertical_row_vanishes = {nf.j_normal[0] && gr.vm_integrable, true};
  rep.contracted_bianchi = {nf.j_normal[0] && gr.vm_integrable, true};
  std::vector<int> H = f.grade_indices(0);
  for (int i : H)
    for (int j : H)
      if (rd.rc(i, j) != rd.rc(j, i)) rep.horizontal_symmetry.holds = false;
  for (int u = 0; u < n; ++u) {
    if (f.horizontal(u)) continue;
    for (int i : H)
      if (!is_zero(rd.rc(u, i))) rep.vertical_row_vanishes.holds = false;
  }
  Tensor rct(n, {'l', 'l'});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rct.at({a, b}) = rd.rc(a, b);
  Tensor nabla_rc = cov_deriv_tensor(gamma, rct);
  for (int x : H) {
    Rational s(0);  // nabla_X S0 vanishes for constant-structure frames
    for (int j : H) s += nabla_rc.at({j, x, j});
    if (!is_zero(2 * s)) rep.contracted_bianchi.holds = false;
  }
  return rep;
}

/// tr(nabla Tor)(A) = sum_i (nabla_{E_i} Tor)(A, E_i) over a horizontal frame.
inline std::vector<Rational> trace_nabla_tor(const GradedFrameSpec& f, const Tensor& nabla_tor,
                                             int a) {
  int n = f.dim();
  std::vector<Rational> out(static_cast<std::size_t>(n), Rational(0));
  for (int d = 0; d < n; ++d)
    for (int i : f.grade_indices(0)) out[static_cast<std::size_t>(d)] += nabla_tor.at({i, a, i, d});
  return out;
}

}  // namespace subrc
