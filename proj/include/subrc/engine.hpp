#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subrc/analysis.hpp"
#include "subrc/curvature.hpp"
#include "subrc/input.hpp"
#include "subrc/jets.hpp"
#include "subrc/report.hpp"
#include "subrc/riemann.hpp"

namespace subrc {

struct Options {
  std::string format = "text";  // text | structured
  Rational tol = rat(1, 1000000);
  std::vector<Rational> grid;       // mu values for riemann, rho1 values for frontier
  std::string grading = "as-given";  // basic | full | <k> | as-given
  std::string out_path;
};

inline GradedFrameSpec apply_grading_choice(const GradedFrameSpec& f, const std::string& choice) {
  if (choice == "as-given" || choice == "full") return f;
  if (choice == "basic") return basic_grading(f);
  int k = std::stoi(choice);
  if (f.r() == 1 && k == 1) return f;
  return subgrading(f, k);
}

/// Loads a frame spec from a catalog name or an input-document path.
inline GradedFrameSpec load_spec(const std::string& name_or_path, const Options& opts) {
  GradedFrameSpec f;
  if (auto builtin = find_builtin(name_or_path)) {
    f = *builtin;
  } else {
    std::ifstream in(name_or_path);
    if (!in) throw std::runtime_error("no catalog entry or readable file named '" + name_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    f = parse_input(ss.str()).spec;
  }
  return apply_grading_choice(f, opts.grading);
}

namespace detail_engine {

inline std::string bool_str(bool b) { return b ? "true" : "false"; }

inline bool fill_validation(Node& root, const GradedFrameSpec& f) {
  Node& val = root.child("validation");
  AlgebraValidation av = validate_algebra(f.sc());
  check_item(val, "antisymmetry", av.antisymmetry_ok, av.detail);
  check_item(val, "jacobi", av.jacobi_ok, av.detail);
  if (!av.pass()) return false;
  GradingReport gr = validate_grading(f);
  check_item(val, "grading_axioms", gr.all_valid());
  for (int j = 0; j <= f.r(); ++j)
    val.set("j_regular_" + std::to_string(j), bool_str(gr.j_regular[static_cast<std::size_t>(j)]));
  val.set("equiregular", bool_str(gr.equiregular));
  val.set("bracket_generating", bool_str(gr.bracket_generating));
  val.set("vm_integrable", bool_str(gr.vm_integrable));
  return gr.all_valid();
}

inline void fill_normality(Node& root, const GradedFrameSpec& f) {
  Node& sec = root.child("normality");
  NormalityFlags nf = normality_flags(f);
  for (int j = 0; j <= f.r(); ++j)
    sec.set("j_normal_" + std::to_string(j), bool_str(nf.j_normal[static_cast<std::size_t>(j)]));
  sec.set("strictly_normal", bool_str(nf.strictly_normal));
  std::string rig;
  for (int i = 0; i < f.dim(); ++i) {
    if (i) rig += " ";
    rig += to_string(nf.rigidity_form[static_cast<std::size_t>(i)]);
  }
  sec.set("rigidity_form", rig);
  // the flag is metric-specific: it reports this frame metric only
  sec.set("vertically_rigid_for_this_metric", bool_str(nf.vertically_rigid_for_this_metric));
}

inline void fill_connection(Node& root, const GradedFrameSpec& f, const ConnCoeffs& gamma,
                            const TorsionTensor& tor) {
  Node& sec = root.child("connection");
  Node& coeffs = sec.child("coefficients");
  int n = f.dim();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (!is_zero(gamma.at(a, b, c)))
          coeffs.set("gamma_" + std::to_string(a + 1) + "_" + std::to_string(b + 1) + "_" +
                         std::to_string(c + 1),
                     to_string(gamma.at(a, b, c)));
  AxiomReport ax = verify_axioms(f, gamma, tor);
  check_item(sec, "axioms", ax.ok(), ax.first_violation);
  if (f.r() == 1) {
    auto [gb, tb] = example_bg_connection(f);
    check_item(sec, "closed_form_oracle", gb.g == gamma.g && tb.t == tor.t);
  }
  if (f.r() >= 2) check_item(sec, "grading_independence", grading_independence_check(f));

  Node& tsec = root.child("torsion");
  Node& tcoeffs = tsec.child("components");
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (!is_zero(tor.at(a, b, c)))
          tcoeffs.set("tor_" + std::to_string(a + 1) + "_" + std::to_string(b + 1) + "_" +
                          std::to_string(c + 1),
                      to_string(tor.at(a, b, c)));
}

inline void fill_curvature(Node& root, const GradedFrameSpec& f, const ConnCoeffs& gamma) {
  Node& sec = root.child("curvature");
  CurvTensor cv = curvature(f, gamma);
  FlatnessFlags fl = flatness_flags(f, cv.rm);
  sec.set("horizontally_flat", bool_str(fl.horizontally_flat));
  sec.set("vertically_flat", bool_str(fl.vertically_flat));
  sec.set("flat", bool_str(fl.flat));
  check_item(sec, "symmetries", symmetry_residuals(f, cv.rm).ok());

  AlgebraicBianchiReport ab = algebraic_bianchi_residual(f, gamma);
  check_item(sec, "algebraic_bianchi", ab.unconditional_zero);
  Node& abc = sec.child("algebraic_bianchi_refinements");
  for (std::size_t j = 0; j < ab.part_a.size(); ++j) {
    conditional_item(abc, "grade" + std::to_string(j) + "_nabla_tor_complement", ab.part_a[j]);
    conditional_item(abc, "grade" + std::to_string(j) + "_tor2_complement", ab.part_b[j]);
    conditional_item(abc, "grade" + std::to_string(j) + "_tor2_mixed", ab.part_c[j]);
  }
  PairSymmetryReport ps = pair_symmetry_checks(f, gamma);
  conditional_item(sec, "horizontal_cyclic_curvature", ps.cyclic_r_horizontal);
  conditional_item(sec, "pair_symmetry_horizontal", ps.horizontal_quadruples);
  conditional_item(sec, "pair_symmetry_three_horizontal", ps.three_horizontal);

  DifferentialBianchiReport db = differential_bianchi_residual(f, gamma);
  check_item(sec, "differential_bianchi_first", db.first_identity_zero);
  conditional_item(sec, "differential_bianchi_second", db.second_identity);

  RicciData rd = ricci(f, cv.rm);
  Node& ric = sec.child("ricci");
  for (int a = 0; a < f.dim(); ++a)
    for (int b = 0; b < f.dim(); ++b)
      if (!is_zero(rd.rc(a, b)))
        ric.set("rc_" + std::to_string(a + 1) + "_" + std::to_string(b + 1), to_string(rd.rc(a, b)));
  sec.set("scalar_curvature_s0", to_string(rd.s0));
  RicciReport rr = ricci_checks(f, gamma, rd);
  conditional_item(sec, "ricci_horizontal_symmetry", rr.horizontal_symmetry);
  conditional_item(sec, "ricci_vertical_rows_vanish", rr.vertical_row_vanishes);
  conditional_item(sec, "contracted_bianchi", rr.contracted_bianchi);
}

inline void fill_certificate(Node& parent, const Certificate& cert) {
  Node& c = parent.child(cert.kind);
  Node& hyp = c.child("hypotheses");
  bool all = true;
  for (const auto& [name, ok] : cert.hypotheses) {
    hyp.set(name, bool_str(ok));
    all = all && ok;
  }
  Node& consts = c.child("constants");
  for (const auto& [k, v] : cert.constants) consts.set(k, v);
  c.set("verdict", cert.compact ? "compact" : "inconclusive");
  if (!cert.note.empty()) c.set("note", cert.note);
  if (!all) set_status(c, "unmet", "certificate hypotheses not met");
}

inline void fill_certificates(Node& root, const GradedFrameSpec& f, const Options& opts) {
  Node& sec = root.child("certificates");
  fill_certificate(sec, myers_certificate(f, opts.tol));
  GradedFrameSpec b = basic_grading(f);
  if (b.v_dim() == 1) {
    fill_certificate(sec, bad_bonnet(f, opts.tol));
    std::vector<Rational> grid = opts.grid.empty() ? default_mu_grid() : opts.grid;
    fill_certificate(sec, riemann_myers_search(f, grid, opts.tol));
  } else {
    set_status(sec.child("bad_bonnet"), "unmet", "requires dim VM = 1");
    set_status(sec.child("riemann_myers"), "unmet", "requires dim VM = 1");
  }
}

inline void fill_riemann(Node& root, const GradedFrameSpec& f, const Options& opts) {
  Node& sec = root.child("riemann");
  GradedFrameSpec b = basic_grading(f);
  ConnCoeffs gamma = canonical_connection(b);
  TorsionTensor tor = torsion(b, gamma);
  TorDerived td = tor_derived(b, gamma, tor);
  LCConn koszul = lc_koszul(b);
  LCConn contorsion = lc_from_basic(b, gamma, tor, td);
  bool oracle_equal = true;
  for (int a = 0; a < b.dim(); ++a)
    for (int bb = 0; bb < b.dim(); ++bb)
      for (int c = 0; c < b.dim(); ++c)
        if (contorsion.at(a, bb, c).eval(rat(1)) != koszul.at(a, bb, c).eval(rat(1)))
          oracle_equal = false;
  check_item(sec, "lc_oracle_equal_mu1", oracle_equal);
  check_item(sec, "lc_invariants", lc_invariants_hold(b, koszul));

  RescaledRicciReport rr = rescaled_ricci(f);
  Node& ricci_node = sec.child("rescaled_ricci");
  for (int i = 0; i < b.dim(); ++i)
    for (int j = i; j < b.dim(); ++j)
      if (!rr.rc.at(i, j).zero())
        ricci_node.set("rc_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                       rr.rc.at(i, j).str());
  if (!opts.grid.empty()) {
    Node& table = sec.child("evaluations");
    for (const Rational& mu : opts.grid) {
      if (is_zero(mu)) continue;
      Node& at = table.child("mu_" + to_string(mu));
      for (int i = 0; i < b.dim(); ++i)
        for (int j = i; j < b.dim(); ++j)
          if (!rr.rc.at(i, j).zero())
            at.set("rc_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                   to_string(rr.rc.at(i, j).eval(mu)));
    }
  }
  if (rr.comparison_available) {
    check_item(sec, "ricci_display_hh", rr.rcfla_zero);
    check_item(sec, "ricci_display_hv", rr.rcflb_zero);
    check_item(sec, "ricci_display_vv", rr.rcflc_zero);
    if (rr.strictly_normal)
      check_item(sec, "ricci_display_strictly_normal", rr.rcflsn_zero);
    else
      set_status(sec.child("ricci_display_strictly_normal"), "unmet", "not strictly normal");
  } else {
    set_status(sec.child("ricci_displays"), "unmet",
               "comparison requires dim VM = 1; Koszul Ricci reported above");
  }
  RmComparisonReport rm = rm_comparison_residuals(f);
  check_item(sec, "rm_display_xy", rm.xy_zero);
  check_item(sec, "rm_display_xt", rm.xt_zero);
  check_item(sec, "rm_display_xyt", rm.xyt_zero);
  if (b.v_dim() == 1) {
    if (normality_flags(b).strictly_normal)
      check_item(sec, "bg_limit", bg_limit_check(f));
    else
      set_status(sec.child("bg_limit"), "unmet", "requires a strictly normal basic grading");
  } else {
    set_status(sec.child("bg_limit"), "unmet", "requires dim VM = 1");
  }
}

inline void fill_jets(Node& root, const GradedFrameSpec& f, bool dedicated_command) {
  Node& sec = root.child("jets");
  auto model = find_model(f.name());
  if (!model) {
    if (dedicated_command)
      set_status(sec, "unmet", "no built-in coordinate model for '" + f.name() + "'");
    else
      sec.set("model", "none");
    return;
  }
  const CoordModel& m = *model;
  CanonicalData d = canonical_data(m.spec);
  SymForm bg = bg_form(d);
  Rng rng(987654321);  // fixed seed keeps reports byte-identical
  int n = m.spec.dim();

  std::vector<std::vector<Rational>> points;
  for (int t = 0; t < 10; ++t) {
    std::vector<Rational> p(static_cast<std::size_t>(n));
    for (auto& x : p) x = rng.next_rational();
    points.push_back(std::move(p));
  }
  std::vector<std::string> fns;
  if (m.name == "heisenberg3")
    fns = {"x^2", "x*y + t", "x*y + t^2", "y*t + x", "x^2*y - t"};
  else if (m.name == "heisenberg5")
    fns = {"x1^2", "x1*y2 + t", "x2*t + y1", "x1*x2 + t^2", "y1*y2 - t"};
  else
    fns = {"x^2", "x*y + t", "t*s - x", "x*s + y^2", "y*t + s^2"};

  bool structure_ok = true, bochner_ok = true, cor0_ok = true, cor1_ok = true, com_ok = true,
       div_ok = true;
  bool strictly_normal = normality_flags(m.spec).strictly_normal;
  auto run = [&](auto scalar_tag) {
    using T = decltype(scalar_tag);
    double tol = 1e-9;
    for (const auto& pr : points) {
      std::vector<T> p;
      for (const auto& q : pr) p.push_back(scalar_from_rat<T>(q));
      PointFrame<T> pf(m, p);
      T serr = structure_consistency_error(m.spec, pf);
      if constexpr (std::is_same_v<T, double>) {
        if (std::abs(serr) > 1e-12) structure_ok = false;
      } else {
        if (!is_zero(serr)) structure_ok = false;
      }
      for (const auto& fs : fns) {
        Expr fn = m.parse(fs);
        FunctionJets<T> fj = function_jets(pf, fn);
        for (int j = 0; j <= 1; ++j) {
          T r = bochner_residual(m.spec, d.gamma, d.tor, d.td, d.rc, pf, fj, j);
          if constexpr (std::is_same_v<T, double>) {
            if (std::abs(r) > tol) bochner_ok = false;
          } else {
            if (!is_zero(r)) bochner_ok = false;
          }
        }
        auto [r0, r1] = bochnerf_residuals(m.spec, d.gamma, d.tor, bg, pf, fj);
        T cm = com_check(m.spec, pf, fj);
        if constexpr (std::is_same_v<T, double>) {
          if (std::abs(r0) > tol) cor0_ok = false;
          if (std::abs(r1) > tol) cor1_ok = false;
          if (std::abs(cm) > tol) com_ok = false;
        } else {
          if (!is_zero(r0)) cor0_ok = false;
          if (!is_zero(r1)) cor1_ok = false;
          if (!is_zero(cm)) com_ok = false;
        }
      }
      // divergence of x1 * E_1 + constants
      std::vector<Expr> h;
      h.push_back(m.parse(m.coords[0]));
      for (std::size_t i = 1; i < static_cast<std::size_t>(m.spec.ranks()[0]); ++i)
        h.push_back(m.parse("2"));
      T dv = divergence_check(m, m.spec, d.gamma, pf, h);
      if constexpr (std::is_same_v<T, double>) {
        if (std::abs(dv) > tol) div_ok = false;
      } else {
        if (!is_zero(dv)) div_ok = false;
      }
    }
  };
  if (m.rational_mode) run(Rational(0)); else run(0.0);

  sec.set("model", m.name);
  sec.set("mode", m.rational_mode ? "exact" : "float");
  check_item(sec, "structure_constants_match", structure_ok);
  check_item(sec, "bochner_identity", bochner_ok);
  conditional_item(sec, "bochner_strictly_normal_horizontal", {strictly_normal, cor0_ok});
  conditional_item(sec, "bochner_strictly_normal_vertical", {strictly_normal, cor1_ok});
  conditional_item(sec, "gamma_commutation", {strictly_normal, com_ok});
  check_item(sec, "divergence_identity", div_ok);
}

}  // namespace detail_engine

inline Report run_analyze(const GradedFrameSpec& f, const Options& opts) {
  Report rep;
  rep.root.set("command", "analyze");
  rep.root.set("spec", f.name());
  if (!detail_engine::fill_validation(rep.root, f)) return rep;
  detail_engine::fill_normality(rep.root, f);
  ConnCoeffs gamma = canonical_connection(f);
  TorsionTensor tor = torsion(f, gamma);
  detail_engine::fill_connection(rep.root, f, gamma, tor);
  detail_engine::fill_curvature(rep.root, f, gamma);
  detail_engine::fill_certificates(rep.root, f, opts);
  detail_engine::fill_riemann(rep.root, f, opts);
  detail_engine::fill_jets(rep.root, f, false);
  return rep;
}

inline Report run_check(const GradedFrameSpec& f, const Options& opts) {
  Report rep;
  rep.root.set("command", "check");
  rep.root.set("spec", f.name());
  if (!detail_engine::fill_validation(rep.root, f)) return rep;
  ConnCoeffs gamma = canonical_connection(f);
  TorsionTensor tor = torsion(f, gamma);
  detail_engine::fill_connection(rep.root, f, gamma, tor);
  detail_engine::fill_curvature(rep.root, f, gamma);
  Node& sec = rep.root.child("riemann");
  GradedFrameSpec b = basic_grading(f);
  ConnCoeffs gb = canonical_connection(b);
  TorsionTensor tb = torsion(b, gb);
  LCConn koszul = lc_koszul(b);
  LCConn contorsion = lc_from_basic(b, gb, tb, tor_derived(b, gb, tb));
  bool oracle_equal = true;
  for (int a = 0; a < b.dim(); ++a)
    for (int bb = 0; bb < b.dim(); ++bb)
      for (int c = 0; c < b.dim(); ++c)
        if (contorsion.at(a, bb, c).eval(rat(1)) != koszul.at(a, bb, c).eval(rat(1)))
          oracle_equal = false;
  check_item(sec, "lc_oracle_equal_mu1", oracle_equal);
  (void)opts;
  return rep;
}

inline Report run_frontier(const GradedFrameSpec& f, const Options& opts) {
  Report rep;
  rep.root.set("command", "frontier");
  rep.root.set("spec", f.name());
  if (!detail_engine::fill_validation(rep.root, f)) return rep;
  CanonicalData d = canonical_data(f);
  SymForm bg = bg_form(d);
  Node& sec = rep.root.child("frontier");
  Node& form = sec.child("bg_form");
  for (int i = 0; i < bg.dim; ++i)
    for (int j = i; j < bg.dim; ++j)
      if (!is_zero(bg.at(i, j)))
        form.set("r_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), to_string(bg.at(i, j)));
  std::vector<Rational> grid = opts.grid;
  if (grid.empty())
    for (int k = 0; k <= 8; ++k) grid.push_back(rat(k, 8));
  Node& pts = sec.child("points");
  for (const auto& pt : cd_frontier(d.basic, bg, grid, opts.tol)) {
    Node& row = pts.child("rho1_" + to_string(pt.rho1));
    row.set("feasible", detail_engine::bool_str(pt.feasible));
    if (pt.feasible) {
      row.set("rho2_max_lower", to_string(pt.rho2_lo));
      row.set("rho2_max_upper", to_string(pt.rho2_hi));
    }
  }
  return rep;
}

inline Report run_riemann(const GradedFrameSpec& f, const Options& opts) {
  Report rep;
  rep.root.set("command", "riemann");
  rep.root.set("spec", f.name());
  if (!detail_engine::fill_validation(rep.root, f)) return rep;
  detail_engine::fill_riemann(rep.root, f, opts);
  GradedFrameSpec b = basic_grading(f);
  if (b.v_dim() == 1) {
    Node& sec = rep.root.child("certificates");
    std::vector<Rational> grid = opts.grid.empty() ? default_mu_grid() : opts.grid;
    detail_engine::fill_certificate(sec, riemann_myers_search(f, grid, opts.tol));
  }
  return rep;
}

inline Report run_bochner(const GradedFrameSpec& f, const Options& opts) {
  Report rep;
  rep.root.set("command", "bochner");
  rep.root.set("spec", f.name());
  if (!detail_engine::fill_validation(rep.root, f)) return rep;
  detail_engine::fill_jets(rep.root, f, true);
  (void)opts;
  return rep;
}

inline Report run_catalog() {
  Report rep;
  rep.root.set("command", "catalog");
  Node& sec = rep.root.child("catalog");
  for (const auto& f : builtin_catalog()) {
    Node& e = sec.child(f.name());
    e.set("dim", std::to_string(f.dim()));
    std::string ranks;
    for (int r : f.ranks()) ranks += (ranks.empty() ? "" : " ") + std::to_string(r);
    e.set("grades", ranks);
    e.set("coordinate_model", find_model(f.name()) ? "yes" : "no");
  }
  return rep;
}

}  // namespace subrc
