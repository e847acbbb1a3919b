#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "subrc/frame.hpp"

namespace subrc {

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(int l, int c, const std::string& what)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what),
        line(l),
        column(c) {}
};

/// Plain-text frame specification:
///
///   # comment
///   name heisenberg3
///   dim 3
///   grades 2 1
///   bracket (1,2) -> 1*3
///   flag some_marker
///
/// Frame indices are 1-based; brackets list only a < b pairs (antisymmetry is
/// implied); the right side is a signed sum of coeff*index terms with exact
/// rational coefficients.
struct InputDocument {
  GradedFrameSpec spec;
  std::vector<std::string> flags;
};

namespace detail_input {

inline void syntax(int line, int col, const std::string& what) { throw ParseError(line, col, what); }

struct BracketTerm {
  Rational coeff;
  int target;  // 1-based
};

inline std::vector<BracketTerm> parse_terms(const std::string& rhs, int line, int base_col) {
  std::vector<BracketTerm> terms;
  std::size_t i = 0;
  auto skip = [&] { while (i < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[i]))) ++i; };
  skip();
  bool first = true;
  while (i < rhs.size()) {
    int sign = 1;
    if (!first || rhs[i] == '+' || rhs[i] == '-') {
      if (rhs[i] == '-') sign = -1;
      else if (rhs[i] != '+')
        syntax(line, base_col + static_cast<int>(i) + 1, "expected '+' or '-' between terms");
      ++i;
      skip();
    }
    std::size_t start = i;
    while (i < rhs.size() && (std::isdigit(static_cast<unsigned char>(rhs[i])) || rhs[i] == '/')) ++i;
    if (start == i) syntax(line, base_col + static_cast<int>(i) + 1, "expected rational coefficient");
    Rational coeff;
    try {
      coeff = parse_rational(rhs.substr(start, i - start));
    } catch (const std::invalid_argument& e) {
      syntax(line, base_col + static_cast<int>(start) + 1, e.what());
    }
    skip();
    if (i >= rhs.size() || rhs[i] != '*')
      syntax(line, base_col + static_cast<int>(i) + 1, "expected '*' after coefficient");
    ++i;
    skip();
    start = i;
    while (i < rhs.size() && std::isdigit(static_cast<unsigned char>(rhs[i]))) ++i;
    if (start == i) syntax(line, base_col + static_cast<int>(i) + 1, "expected frame index");
    int target = std::stoi(rhs.substr(start, i - start));
    terms.push_back({sign < 0 ? Rational(-coeff) : coeff, target});
    skip();
    first = false;
  }
  if (terms.empty()) syntax(line, base_col + 1, "empty bracket expansion");
  return terms;
}

}  // namespace detail_input

inline InputDocument parse_input(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::string name;
  int dim = -1;
  std::vector<int> grades;
  std::vector<std::string> flags;
  struct RawBracket {
    int a, b;
    std::vector<detail_input::BracketTerm> terms;
    int line;
  };
  std::vector<RawBracket> brackets;

  while (std::getline(in, line)) {
    ++lineno;
    std::size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "name") {
      if (!(ls >> name)) detail_input::syntax(lineno, 6, "expected a name");
    } else if (word == "dim") {
      if (!(ls >> dim) || dim <= 0) detail_input::syntax(lineno, 5, "expected a positive dimension");
    } else if (word == "grades") {
      int g;
      while (ls >> g) {
        if (g <= 0) detail_input::syntax(lineno, 8, "grading ranks must be positive");
        grades.push_back(g);
      }
      if (grades.empty()) detail_input::syntax(lineno, 8, "expected grading ranks");
    } else if (word == "bracket") {
      std::string rest;
      std::getline(ls, rest);
      std::size_t arrow = rest.find("->");
      if (arrow == std::string::npos)
        detail_input::syntax(lineno, static_cast<int>(line.size()), "expected '->'");
      std::string lhs = rest.substr(0, arrow), rhs = rest.substr(arrow + 2);
      int a = 0, b = 0;
      char c1 = 0, c2 = 0, c3 = 0;
      std::istringstream lp(lhs);
      if (!(lp >> c1 >> a >> c2 >> b >> c3) || c1 != '(' || c2 != ',' || c3 != ')')
        detail_input::syntax(lineno, 9, "expected '(a, b)'");
      if (a >= b) detail_input::syntax(lineno, 9, "bracket pairs must satisfy a < b");
      brackets.push_back({a, b, detail_input::parse_terms(rhs, lineno, static_cast<int>(arrow) + 10), lineno});
    } else if (word == "flag") {
      std::string f;
      if (!(ls >> f)) detail_input::syntax(lineno, 6, "expected a flag name");
      flags.push_back(f);
    } else {
      detail_input::syntax(lineno, 1, "unknown directive '" + word + "'");
    }
  }
  if (dim <= 0) detail_input::syntax(lineno, 1, "missing 'dim'");
  if (grades.size() < 2) detail_input::syntax(lineno, 1, "need at least two grading ranks (n0 n1 ...)");
  int total = 0;
  for (int g : grades) total += g;
  if (total != dim) detail_input::syntax(lineno, 1, "grading ranks must sum to dim");
  if (name.empty()) name = "input";

  StructureConstants sc(dim);
  std::vector<bool> seen(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), false);
  for (const auto& br : brackets) {
    if (br.a < 1 || br.b > dim) detail_input::syntax(br.line, 9, "frame index out of range");
    std::size_t key = static_cast<std::size_t>(br.a - 1) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(br.b - 1);
    if (seen[key]) detail_input::syntax(br.line, 9, "duplicate bracket pair");
    seen[key] = true;
    for (const auto& t : br.terms) {
      if (t.target < 1 || t.target > dim) detail_input::syntax(br.line, 9, "target index out of range");
      sc.set_bracket(br.a - 1, br.b - 1, t.target - 1, t.coeff);
    }
  }
  return {GradedFrameSpec(name, sc, grades), flags};
}

/// Canonical rendering; parse(render(doc)) reproduces the document exactly.
inline std::string render_input(const InputDocument& doc) {
  const GradedFrameSpec& f = doc.spec;
  std::string out;
  out += "name " + f.name() + "\n";
  out += "dim " + std::to_string(f.dim()) + "\n";
  out += "grades";
  for (int g : f.ranks()) out += " " + std::to_string(g);
  out += "\n";
  for (int a = 0; a < f.dim(); ++a)
    for (int b = a + 1; b < f.dim(); ++b) {
      std::string rhs;
      for (int k = 0; k < f.dim(); ++k) {
        const Rational& c = f.sc().c(a, b, k);
        if (is_zero(c)) continue;
        bool neg = c < 0;
        rhs += rhs.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
        rhs += to_string(abs_rat(c)) + "*" + std::to_string(k + 1);
      }
      if (!rhs.empty())
        out += "bracket (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ") -> " + rhs + "\n";
    }
  for (const auto& fl : doc.flags) out += "flag " + fl + "\n";
  return out;
}

}  // namespace subrc
