#include <catch2/catch_amalgamated.hpp>

#include "subrc/connection.hpp"
#include "test_support.hpp"

using namespace subrc;

namespace {
// frame indices used by the four-dimensional examples
constexpr int X = 0, Y = 1, T = 2, S = 3;
}  // namespace

TEST_CASE("B tensor values") {
  GradedFrameSpec c3 = find_builtin("c3").value();
  BTensor B = b_tensor(c3);
  CHECK(B.at(T, S, X) == -1);
  CHECK(B.at(S, T, X) == -1);  // symmetric in the first two slots

  // only the graded restrictions are tensorial; for the basic grading the
  // single surviving component is B~(1)(T,S,X) = -1 and its mirror
  GradedFrameSpec basic = find_builtin("c3_basic").value();
  int nonzero = 0;
  for (int j = 0; j <= basic.r(); ++j)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          if (!is_zero(b_restricted(basic, B, j, a, b, c))) {
            ++nonzero;
            CHECK(b_restricted(basic, B, j, a, b, c) == -1);
          }
  CHECK(nonzero == 2);

  GradedFrameSpec ab = find_builtin("abelian3").value();
  BTensor Bab = b_tensor(ab);
  for (const auto& v : Bab.b) CHECK(is_zero(v));

  GradedFrameSpec h = find_builtin("heisenberg3").value();
  NormalityFlags nf = normality_flags(h);
  CHECK(nf.j_normal[1]);  // B vanishes on V x V x H
}

TEST_CASE("C tensor raising and traces") {
  GradedFrameSpec basic = find_builtin("c3_basic").value();
  Tensor C1 = c_tensor(basic, 1);
  CHECK(C1.at({T, X, S}) == -1);  // <C(1)(T,X), S> = B(1)(T,S,X)
  CHECK(C1.at({S, X, T}) == -1);
  CHECK(is_zero(C1.at({T, X, T})));
  // tr_1 B(1) vanishes here although B(1) itself does not
  for (const auto& v : trace_bj(basic, 1)) CHECK(is_zero(v));

  // the cross-grade connection component is bracket + half the raised tensor
  ConnCoeffs g = canonical_connection(basic);
  CHECK(g.at(X, T, S) == basic.sc().c(X, T, S) + C1.at({T, X, S}) / 2);
}

TEST_CASE("normality flags") {
  NormalityFlags c3full = normality_flags(find_builtin("c3").value());
  CHECK(c3full.strictly_normal);

  NormalityFlags c3basic = normality_flags(find_builtin("c3_basic").value());
  CHECK(c3basic.j_normal[0]);
  CHECK_FALSE(c3basic.j_normal[1]);
  CHECK_FALSE(c3basic.strictly_normal);

  NormalityFlags sn = normality_flags(find_builtin("sn").value());
  CHECK(sn.strictly_normal);

  NormalityFlags su2 = normality_flags(find_builtin("su2").value());
  CHECK(su2.strictly_normal);

  // every catalog entry here is unimodular, hence rigid
  for (const auto& f : builtin_catalog())
    CHECK(normality_flags(f).vertically_rigid_for_this_metric);
}

TEST_CASE("canonical connection on C3, basic grading") {
  GradedFrameSpec f = find_builtin("c3_basic").value();
  ConnCoeffs g = canonical_connection(f);
  CHECK(g.at(X, T, S) == rat(1, 2));    // nabla_X T = S/2
  CHECK(g.at(X, S, T) == rat(-1, 2));   // nabla_X S = -T/2
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 4; ++c) CHECK(is_zero(g.at(a, b, c)));  // horizontal arguments parallel

  TorsionTensor tor = torsion(f, g);
  CHECK(tor.at(X, Y, T) == -1);
  CHECK(tor.at(X, T, S) == rat(-1, 2));
  CHECK(tor.at(X, S, T) == rat(-1, 2));
}

TEST_CASE("canonical connection on C3, two-step grading") {
  GradedFrameSpec f = find_builtin("c3").value();
  ConnCoeffs g = canonical_connection(f);
  for (const auto& v : g.g) CHECK(is_zero(v));  // every frame element parallel

  TorsionTensor tor = torsion(f, g);
  CHECK(tor.at(X, Y, T) == -1);
  CHECK(tor.at(X, T, S) == -1);
  for (int c = 0; c < 4; ++c) CHECK(is_zero(tor.at(X, S, c)));  // Tor2(X,S) = 0
}

TEST_CASE("canonical connection on su(2)") {
  GradedFrameSpec f = find_builtin("su2").value();
  ConnCoeffs g = canonical_connection(f);
  CHECK(g.at(2, 0, 1) == 1);   // nabla_T X = Y
  CHECK(g.at(2, 1, 0) == -1);  // nabla_T Y = -X
  int nonzero = 0;
  for (const auto& v : g.g)
    if (!is_zero(v)) ++nonzero;
  CHECK(nonzero == 2);
}

TEST_CASE("sn: metric compatibility forces nabla_X S = -T") {
  GradedFrameSpec f = find_builtin("sn").value();
  ConnCoeffs g = canonical_connection(f);
  CHECK(g.at(X, T, S) == 1);
  CHECK(g.at(X, S, T) == -1);
  TorsionTensor tor = torsion(f, g);
  CHECK(tor.at(X, Y, T) == -1);
  for (int c = 0; c < 4; ++c) {
    CHECK(is_zero(tor.at(X, T, c)));
    CHECK(is_zero(tor.at(X, S, c)));
  }
}

TEST_CASE("heisenberg torsion") {
  GradedFrameSpec f = find_builtin("heisenberg3").value();
  ConnCoeffs g = canonical_connection(f);
  TorsionTensor tor = torsion(f, g);
  CHECK(tor.at(0, 1, 2) == -1);
  int nonzero = 0;
  for (const auto& v : tor.t)
    if (!is_zero(v)) ++nonzero;
  CHECK(nonzero == 2);
}

TEST_CASE("connection axioms hold on the catalog and reject perturbations") {
  Rng rng(31);
  for (const auto& f : builtin_catalog()) {
    INFO(f.name());
    ConnCoeffs g = canonical_connection(f);
    TorsionTensor tor = torsion(f, g);
    CHECK(verify_axioms(f, g, tor).ok());

    for (int t = 0; t < 8; ++t) {
      ConnCoeffs bad = g;
      int n = f.dim();
      int a = static_cast<int>(rng.next_int(0, n - 1));
      int b = static_cast<int>(rng.next_int(0, n - 1));
      int c = static_cast<int>(rng.next_int(0, n - 1));
      bad.at(a, b, c) += 1;
      CHECK_FALSE(verify_axioms(f, bad, torsion(f, bad)).ok());
    }
  }
}

TEST_CASE("Levi-Civita coefficients violate grade preservation") {
  GradedFrameSpec f = find_builtin("heisenberg3").value();
  ConnCoeffs lc(3);
  lc.at(0, 1, 2) = rat(1, 2);  lc.at(0, 2, 1) = rat(-1, 2);
  lc.at(1, 0, 2) = rat(-1, 2); lc.at(1, 2, 0) = rat(1, 2);
  lc.at(2, 0, 1) = rat(-1, 2); lc.at(2, 1, 0) = rat(1, 2);
  AxiomReport rep = verify_axioms(f, lc, torsion(f, lc));
  CHECK(rep.metric_compatible);
  CHECK_FALSE(rep.grades_parallel);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("worked closed forms agree with the general construction") {
  Rng rng(57);
  std::vector<GradedFrameSpec> specs;
  for (const auto& f : builtin_catalog()) specs.push_back(basic_grading(f));
  for (int t = 0; t < 20; ++t) specs.push_back(testing::random_step2(rng, 3, 2, "rnd2"));
  for (int t = 0; t < 10; ++t) specs.push_back(testing::random_derivation(rng, 3, "rndd"));
  for (const auto& f : specs) {
    INFO(f.name());
    ConnCoeffs g = canonical_connection(f);
    TorsionTensor tor = torsion(f, g);
    auto [gb, torb] = example_bg_connection(f);
    CHECK(g.g == gb.g);
    CHECK(tor.t == torb.t);
  }
}

TEST_CASE("grading independence") {
  CHECK(grading_independence_check(find_builtin("c3").value()));
  CHECK(grading_independence_check(find_builtin("carnot5").value()));
  CHECK(grading_independence_check(find_builtin("heisenberg3").value()));  // vacuous at r = 1
}

TEST_CASE("covariant derivative of tensors") {
  GradedFrameSpec f = find_builtin("c3_basic").value();
  ConnCoeffs g = canonical_connection(f);

  Tensor metric(4, {'l', 'l'});
  for (int i = 0; i < 4; ++i) metric.at({i, i}) = 1;
  CHECK(cov_deriv_tensor(g, metric).zero());

  TorsionTensor tor = torsion(f, g);
  Tensor nt = cov_deriv_tensor(g, torsion_as_tensor(tor));
  CHECK(nt.at({X, X, Y, S}) == rat(-1, 2));  // (nabla_X Tor)(X,Y) = -S/2

  GradedFrameSpec ab = find_builtin("abelian3").value();
  ConnCoeffs gz = canonical_connection(ab);
  Rng rng(5);
  Tensor tau(3, {'l', 'u'});
  for (auto& v : tau.data) v = rng.next_rational();
  CHECK(cov_deriv_tensor(gz, tau).zero());

  Tensor bad(4, {'l', 'q'});
  CHECK_THROWS_AS(cov_deriv_tensor(g, bad), SignatureMismatch);
}
