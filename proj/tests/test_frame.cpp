#include <catch2/catch_amalgamated.hpp>

#include "subrc/frame.hpp"
#include "test_support.hpp"

using namespace subrc;

TEST_CASE("validate_algebra") {
  StructureConstants abelian(3);
  CHECK(validate_algebra(abelian).pass());

  StructureConstants heis(3);
  heis.set_bracket(0, 1, 2, rat(1));
  CHECK(validate_algebra(heis).pass());

  // [X,Y] = T with [X,T] = X violates Jacobi
  StructureConstants bad(3);
  bad.set_bracket(0, 1, 2, rat(1));
  bad.set_bracket(0, 2, 0, rat(1));
  AlgebraValidation v = validate_algebra(bad);
  CHECK_FALSE(v.pass());
  CHECK_FALSE(v.jacobi_ok);
  CHECK(v.fail_a == 0);

  // diagonal three-dimensional bracket tables always satisfy Jacobi,
  // whatever the signs
  StructureConstants diag3(3);
  diag3.set_bracket(0, 1, 2, rat(1));
  diag3.set_bracket(1, 2, 0, rat(1));
  diag3.set_bracket(2, 0, 1, rat(-1));
  CHECK(validate_algebra(diag3).pass());
}

TEST_CASE("validate_grading on C3") {
  GradedFrameSpec c3 = find_builtin("c3").value();
  GradingReport rep = validate_grading(c3);
  CHECK(rep.all_valid());
  CHECK(rep.equiregular);
  CHECK(rep.bracket_generating);
  CHECK(rep.vm_integrable);

  GradedFrameSpec basic = find_builtin("c3_basic").value();
  GradingReport repb = validate_grading(basic);
  CHECK(repb.all_valid());         // the basic grading is always valid
  CHECK_FALSE(repb.j_regular[0]);  // [H,H] only reaches T inside V1
  CHECK_FALSE(repb.j_regular[1]);  // bracket span falls back into V1
  CHECK_FALSE(repb.equiregular);
  CHECK(repb.vm_integrable);
}

TEST_CASE("validate_grading catches non-generating frames") {
  GradedFrameSpec ab = find_builtin("abelian3").value();
  GradingReport rep = validate_grading(ab);
  CHECK(rep.all_valid());
  CHECK_FALSE(rep.bracket_generating);
}

TEST_CASE("subgrading") {
  GradedFrameSpec c3 = find_builtin("c3").value();
  GradedFrameSpec b = subgrading(c3, 1);
  CHECK(b.ranks() == std::vector<int>{2, 2});
  CHECK(validate_grading(b).all_valid());

  StructureConstants sc(6);
  GradedFrameSpec f("x", sc, {3, 1, 1, 1});
  CHECK(subgrading(f, 2).ranks() == std::vector<int>{3, 1, 2});
  CHECK_THROWS_AS(subgrading(f, 3), BadIndex);
  CHECK_THROWS_AS(subgrading(f, 0), BadIndex);
}

TEST_CASE("builtin catalog") {
  auto cat = builtin_catalog();
  REQUIRE(cat.size() >= 6);
  for (const auto& f : cat) {
    INFO(f.name());
    CHECK(validate_algebra(f.sc()).pass());
    CHECK(validate_grading(f).all_valid());
    if (f.r() >= 2) {
      for (int k = 1; k < f.r(); ++k) CHECK(validate_grading(subgrading(f, k)).all_valid());
    }
  }

  GradedFrameSpec h = find_builtin("heisenberg3").value();
  CHECK(h.sc().c(0, 1, 2) == 1);
  GradedFrameSpec c3 = find_builtin("c3").value();
  CHECK(c3.sc().c(0, 2, 3) == 1);
  GradedFrameSpec sn = find_builtin("sn").value();
  CHECK(sn.sc().c(0, 1, 2) == 1);
  CHECK(sn.sc().c(0, 3, 2) == -1);
  CHECK(sn.sc().c(0, 2, 3) == 1);
}

TEST_CASE("random step-2 algebras always validate") {
  Rng rng(123);
  for (int t = 0; t < 25; ++t) {
    GradedFrameSpec f = testing::random_step2(rng, 3, 2, "rnd");
    CHECK(validate_algebra(f.sc()).pass());
    GradingReport rep = validate_grading(f);
    CHECK(rep.all_valid());
    CHECK(rep.vm_integrable);
  }
}
