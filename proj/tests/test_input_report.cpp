#include <catch2/catch_amalgamated.hpp>

#include "subrc/input.hpp"
#include "subrc/report.hpp"

using namespace subrc;

TEST_CASE("parse a heisenberg document") {
  std::string text =
      "# the three dimensional heisenberg group\n"
      "name h3\n"
      "dim 3\n"
      "grades 2 1\n"
      "bracket (1,2) -> 1*3\n";
  InputDocument doc = parse_input(text);
  CHECK(doc.spec.name() == "h3");
  CHECK(doc.spec.dim() == 3);
  CHECK(doc.spec.ranks() == std::vector<int>{2, 1});
  CHECK(doc.spec.sc().c(0, 1, 2) == 1);
  CHECK(doc.spec.sc().c(1, 0, 2) == -1);
}

TEST_CASE("parse the C3 document") {
  std::string text =
      "name c3_user\n"
      "dim 4\n"
      "grades 2 1 1\n"
      "bracket (1,2) -> 1*3\n"
      "bracket (1,3) -> 1*4\n";
  InputDocument doc = parse_input(text);
  GradedFrameSpec cat = find_builtin("c3").value();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 4; ++k) CHECK(doc.spec.sc().c(a, b, k) == cat.sc().c(a, b, k));
  CHECK(doc.spec.ranks() == cat.ranks());
}

TEST_CASE("parse errors carry line and column") {
  std::string bad =
      "name x\n"
      "dim 3\n"
      "grades 2 1\n"
      "bracket (1,2) -> 1.5x*3\n";
  try {
    parse_input(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.column > 0);
  }

  CHECK_THROWS_AS(parse_input("dim 3\ngrades 2 1\nbracket (2,1) -> 1*3\n"), ParseError);
  CHECK_THROWS_AS(parse_input("dim 3\ngrades 2 1\nbracket (1,2) -> 1*9\n"), ParseError);
  CHECK_THROWS_AS(parse_input("dim 3\ngrades 2 2\n"), ParseError);
  CHECK_THROWS_AS(parse_input("dim 3\ngrades 2 1\nbogus 1\n"), ParseError);
  CHECK_THROWS_AS(
      parse_input("dim 3\ngrades 2 1\nbracket (1,2) -> 1*3\nbracket (1,2) -> 1*3\n"), ParseError);
}

TEST_CASE("render and parse round trip") {
  for (const auto& f : builtin_catalog()) {
    InputDocument doc{f, {"marker"}};
    std::string text = render_input(doc);
    InputDocument back = parse_input(text);
    CHECK(back.spec.name() == f.name());
    CHECK(back.spec.ranks() == f.ranks());
    CHECK(back.flags == doc.flags);
    for (int a = 0; a < f.dim(); ++a)
      for (int b = 0; b < f.dim(); ++b)
        for (int k = 0; k < f.dim(); ++k) CHECK(back.spec.sc().c(a, b, k) == f.sc().c(a, b, k));
    CHECK(render_input(back) == text);
  }
}

TEST_CASE("negative coefficients round trip") {
  std::string text =
      "name sn_user\n"
      "dim 4\n"
      "grades 2 2\n"
      "bracket (1,2) -> 1*3\n"
      "bracket (1,3) -> 1*4\n"
      "bracket (1,4) -> -1*3\n";
  InputDocument doc = parse_input(text);
  CHECK(doc.spec.sc().c(0, 3, 2) == -1);
  InputDocument back = parse_input(render_input(doc));
  CHECK(back.spec.sc().c(0, 3, 2) == -1);
}

TEST_CASE("report exit codes") {
  Report ok;
  check_item(ok.root.child("curvature"), "x", true);
  CHECK(exit_code(ok) == 0);

  Report invalid;
  check_item(invalid.root.child("validation"), "jacobi", false, "boom");
  CHECK(exit_code(invalid) == 1);

  Report violation;
  check_item(violation.root.child("curvature"), "symmetries", false);
  CHECK(exit_code(violation) == 2);

  Report unmet;
  set_status(unmet.root.child("riemann").child("bg_limit"), "unmet", "requires dim VM = 1");
  CHECK(exit_code(unmet) == 3);

  Report info;
  conditional_item(info.root.child("curvature"), "cond", {false, false});
  CHECK(exit_code(info) == 0);  // informational only

  Report cond_fail;
  conditional_item(cond_fail.root.child("curvature"), "cond", {true, false});
  CHECK(exit_code(cond_fail) == 2);
}

TEST_CASE("renderings carry the same data") {
  Report r;
  Node& sec = r.root.child("curvature");
  check_item(sec, "symmetries", true);
  sec.set("flat", "true");
  r.root.child("empty_section");
  std::string structured = render_structured(r);
  std::string text = render_text(r);
  CHECK(structured.find("symmetries {") != std::string::npos);
  CHECK(structured.find("status = pass") != std::string::npos);
  CHECK(structured.find("flat = true") != std::string::npos);
  CHECK(structured.find("empty_section {") != std::string::npos);  // kept as empty node
  CHECK(text.find("[PASS] symmetries") != std::string::npos);
  CHECK(text.find("flat = true") != std::string::npos);
  CHECK(text.find("empty_section") == std::string::npos);  // omitted in text
}
