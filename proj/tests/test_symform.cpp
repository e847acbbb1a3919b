#include <catch2/catch_amalgamated.hpp>

#include "subrc/symform.hpp"
#include "test_support.hpp"

using namespace subrc;

namespace {

SymForm diag(const std::vector<Rational>& d) {
  SymForm g(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) g.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return g;
}

}  // namespace

TEST_CASE("psd_check on pinned forms") {
  CHECK(psd_check(diag({rat(1), rat(1), rat(1)})));

  SymForm g(2);
  g.at(0, 0) = 1; g.at(0, 1) = 2; g.at(1, 0) = 2; g.at(1, 1) = 1;
  CHECK_FALSE(psd_check(g));  // eigenvalues -1, 3

  // Heisenberg Baudoin-Garofalo form; diagonal, so eigenvalues are the entries
  CHECK(psd_check(diag({rat(0), rat(0), rat(1, 2)})));
}

TEST_CASE("min_eig_bounds brackets") {
  Rational tol = rat(1, 1000);

  auto [lo1, hi1] = min_eig_bounds(diag({rat(2), rat(5)}), tol);
  CHECK(lo1 <= 2); CHECK(hi1 >= 2); CHECK(hi1 - lo1 <= tol);

  SymForm sw(2);
  sw.at(0, 1) = 1; sw.at(1, 0) = 1;  // eigenvalues -1, 1
  auto [lo2, hi2] = min_eig_bounds(sw, tol);
  CHECK(lo2 <= -1); CHECK(hi2 >= -1); CHECK(hi2 - lo2 <= tol);

  // su(2) Baudoin-Garofalo form, minimum eigenvalue 1/2 computed exactly
  auto [lo3, hi3] = min_eig_bounds(diag({rat(1), rat(1), rat(1, 2)}), tol);
  CHECK(lo3 <= rat(1, 2)); CHECK(hi3 >= rat(1, 2)); CHECK(hi3 - lo3 <= tol);
}

TEST_CASE("psd_check and min_eig_bounds never contradict") {
  Rng rng(7);
  Rational tol = rat(1, 4096);
  for (int t = 0; t < 60; ++t) {
    int n = static_cast<int>(rng.next_int(1, 4));
    SymForm g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Rational v = rng.next_rational();
        g.at(i, j) = v;
        g.at(j, i) = v;
      }
    auto [lo, hi] = min_eig_bounds(g, tol);
    CHECK(lo <= hi);
    CHECK(hi - lo <= tol);
    if (psd_check(g)) {
      CHECK(lo >= -tol);
      CHECK(hi >= 0);
    } else {
      CHECK(lo < 0);
    }
  }
}

TEST_CASE("rational eigenvalue extraction") {
  SymForm g = diag({rat(1), rat(1), rat(1, 2)});
  auto roots = rational_eigenvalues(g);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == rat(1, 2));
  CHECK(roots[1] == 1);
  CHECK(exact_min_eigenvalue(g).value() == rat(1, 2));
  CHECK(exact_max_eigenvalue(g).value() == 1);

  SymForm z = diag({rat(0), rat(0), rat(1, 2)});
  CHECK(exact_min_eigenvalue(z).value() == 0);
}

TEST_CASE("charpoly matches determinant structure") {
  // companion-style pinned case: diag(2,5) -> (x-2)(x-5) = x^2 - 7x + 10
  auto c = charpoly(diag({rat(2), rat(5)}).as_mat());
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 10);
  CHECK(c[1] == -7);
  CHECK(c[2] == 1);
}
