#include <catch2/catch_amalgamated.hpp>

#include "subrc/analysis.hpp"
#include "test_support.hpp"

using namespace subrc;

namespace {
Rational tol_tiny() { return rat(1, 1000000); }
}  // namespace

TEST_CASE("Baudoin-Garofalo form values") {
  CanonicalData h = canonical_data(find_builtin("heisenberg3").value());
  SymForm bh = bg_form(h);
  CHECK(bh.at(0, 0) == 0);
  CHECK(bh.at(1, 1) == 0);
  CHECK(bh.at(2, 2) == rat(1, 2));
  CHECK(bh.at(0, 1) == 0);
  CHECK(bh.at(0, 2) == 0);

  CanonicalData s = canonical_data(find_builtin("su2").value());
  SymForm bs = bg_form(s);
  CHECK(bs.at(0, 0) == 1);
  CHECK(bs.at(1, 1) == 1);
  CHECK(bs.at(2, 2) == rat(1, 2));
  CHECK(bs.at(0, 1) == 0);

  CanonicalData a = canonical_data(find_builtin("abelian3").value());
  for (const auto& v : bg_form(a).m) CHECK(is_zero(v));
}

TEST_CASE("polarization consistency on random vectors") {
  Rng rng(21);
  for (const char* name : {"heisenberg3", "su2", "sn", "c3_basic", "carnot5"}) {
    GradedFrameSpec f = find_builtin(name).value();
    CanonicalData d = canonical_data(f);
    SymForm g = bg_form(d);
    for (int t = 0; t < 100; ++t) {
      std::vector<Rational> v = testing::random_vector(rng, d.basic.dim());
      Rational via_form(0);
      for (int i = 0; i < g.dim; ++i)
        for (int j = 0; j < g.dim; ++j)
          via_form += g.at(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
      CHECK(via_form == bg_quadratic(d, v));
    }
  }
}

TEST_CASE("torsion bounds") {
  Rational tol = tol_tiny();
  {
    CanonicalData d = canonical_data(find_builtin("heisenberg3").value());
    TorsionBound k = torsion_bounds(d.basic, d.tor, 0, 0, 1, tol);
    CHECK(k.exact());
    CHECK(k.lower == 1);
  }
  {
    CanonicalData d = canonical_data(find_builtin("abelian3").value());
    TorsionBound k = torsion_bounds(d.basic, d.tor, 0, 0, 1, tol);
    CHECK(k.exact());
    CHECK(is_zero(k.lower));
  }
  {
    // C3 basic: Tor(X,T) = -S/2, Tor(X,S) = -T/2; the vertical part of
    // Tor(H,V) has squared sup exactly 1/4
    CanonicalData d = canonical_data(find_builtin("c3_basic").value());
    TorsionBound k = torsion_bounds(d.basic, d.tor, 0, 1, 1, tol);
    CHECK(k.lower <= rat(1, 4));
    CHECK(k.upper >= rat(1, 4));
    CHECK(k.upper - k.lower <= tol);
  }
  {
    CanonicalData d = canonical_data(find_builtin("su2").value());
    TorsionBound k = torsion_bounds(d.basic, d.tor, 0, 0, 1, tol);
    CHECK(k.exact());
    CHECK(k.lower == 1);
  }
}

TEST_CASE("torsion bound invariants") {
  Rng rng(77);
  Rational tol = tol_tiny();
  for (int t = 0; t < 10; ++t) {
    GradedFrameSpec f = testing::random_step2(rng, 3, 2, "rnd");
    CanonicalData d = canonical_data(f);
    TorsionBound k = torsion_bounds(d.basic, d.tor, 0, 0, 1, tol);
    CHECK(k.lower <= k.upper);
    CHECK(k.finite);
  }
}

TEST_CASE("cd feasibility") {
  GradedFrameSpec h = find_builtin("heisenberg3").value();
  SymForm bh = bg_form(canonical_data(h));
  CHECK(cd_feasible(h, bh, rat(0), rat(1, 2)));
  CHECK_FALSE(cd_feasible(h, bh, rat(1, 1000), rat(1, 1000)));
  CHECK_FALSE(cd_feasible(h, bh, rat(0), rat(1, 2) + tol_tiny()));

  GradedFrameSpec s = find_builtin("su2").value();
  SymForm bs = bg_form(canonical_data(s));
  CHECK(cd_feasible(s, bs, rat(1), rat(1, 2)));
  CHECK_FALSE(cd_feasible(s, bs, rat(1) + tol_tiny(), rat(1, 2)));

  GradedFrameSpec a = find_builtin("abelian3").value();
  SymForm ba = bg_form(canonical_data(a));
  CHECK(cd_feasible(a, ba, rat(0), rat(0)));
  CHECK_FALSE(cd_feasible(a, ba, rat(0), rat(1, 1000)));
}

TEST_CASE("cd feasibility is monotone") {
  Rng rng(13);
  GradedFrameSpec s = find_builtin("su2").value();
  SymForm bs = bg_form(canonical_data(s));
  for (int t = 0; t < 50; ++t) {
    Rational r1 = rng.next_rational(2, 2), r2 = rng.next_rational(2, 2);
    if (!cd_feasible(s, bs, r1, r2)) continue;
    Rational d1 = abs_rat(rng.next_rational()), d2 = abs_rat(rng.next_rational());
    CHECK(cd_feasible(s, bs, r1 - d1, r2 - d2));
  }
}

TEST_CASE("myers certificates") {
  Certificate ch = myers_certificate(find_builtin("heisenberg3").value());
  CHECK(ch.hypotheses_pass());
  CHECK_FALSE(ch.compact);
  CHECK(ch.constants.at("rho1_max_lower") == "0");
  CHECK(ch.constants.at("rho1_max_upper") == "0");
  CHECK(ch.constants.at("kappa00_1") == "1");
  CHECK(ch.constants.at("kappa") == "2");
  CHECK(ch.constants.at("rho2") == "1/2");

  Certificate cs = myers_certificate(find_builtin("su2").value());
  CHECK(cs.hypotheses_pass());
  CHECK(cs.compact);
  CHECK(cs.constants.at("rho1") == "1");
  CHECK(cs.constants.at("rho2") == "1/2");
  CHECK(cs.constants.at("kappa") == "2");

  Certificate cc = myers_certificate(find_builtin("c3_basic").value());
  CHECK_FALSE(cc.hypotheses_pass());
  CHECK_FALSE(cc.compact);

  Certificate cn = myers_certificate(find_builtin("sn").value());
  CHECK(cn.hypotheses_pass());  // strictly normal and integrable
  CHECK_FALSE(cn.compact);      // but the form has a negative direction
}

TEST_CASE("certificates never report compact under failed hypotheses") {
  for (const char* name : {"c3_basic", "carnot5"}) {
    Certificate c = myers_certificate(find_builtin(name).value());
    CHECK_FALSE(c.hypotheses_pass());
    CHECK_FALSE(c.compact);
  }
}

TEST_CASE("cd frontier") {
  GradedFrameSpec s = find_builtin("su2").value();
  SymForm bs = bg_form(canonical_data(s));
  std::vector<Rational> grid{rat(0), rat(1, 2), rat(1), rat(3, 2)};
  auto fr = cd_frontier(s, bs, grid, tol_tiny());
  REQUIRE(fr.size() == 4);
  CHECK(fr[0].feasible);
  CHECK(fr[0].rho2_lo == rat(1, 2));  // exact candidates collapse the bracket
  CHECK(fr[1].feasible);
  CHECK(fr[1].rho2_lo == rat(1, 2));
  CHECK(fr[2].feasible);
  CHECK(fr[2].rho2_lo == rat(1, 2));
  CHECK_FALSE(fr[3].feasible);
}

TEST_CASE("bad bonnet") {
  Certificate ch = bad_bonnet(find_builtin("heisenberg3").value());
  CHECK(ch.constants.at("a") == "0");
  CHECK_FALSE(ch.compact);

  Certificate ca = bad_bonnet(find_builtin("abelian3").value());
  CHECK(ca.constants.at("a") == "0");
  CHECK_FALSE(ca.compact);

  Certificate cs = bad_bonnet(find_builtin("su2").value());
  CHECK(cs.constants.at("a") == "0");  // nabla Tor and Tor(H,V)_0 both vanish
  CHECK_FALSE(cs.compact);

  CHECK_THROWS_AS(bad_bonnet(find_builtin("sn").value()), VerticalRankNotOne);
}
