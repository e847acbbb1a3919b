#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "subrc/analysis.hpp"
#include "subrc/connection.hpp"
#include "subrc/curvature.hpp"
#include "subrc/frame.hpp"

namespace subrc {

struct UnsupportedAtom : std::runtime_error {
  explicit UnsupportedAtom(const std::string& what) : std::runtime_error(what) {}
};

struct HypothesisNotMet : std::runtime_error {
  explicit HypothesisNotMet(const std::string& what) : std::runtime_error(what) {}
};

/// Expression over the atom set {constants, coordinates, sums, products,
/// sin, cos}; powers are sugar for repeated products.
struct Expr {
  enum class Kind { Constant, Var, Add, Mul, Sin, Cos, Pow };
  Kind kind = Kind::Constant;
  Rational value;
  int var = 0;
  int power = 1;
  std::vector<Expr> kids;

  static Expr constant(const Rational& q) {
    Expr e;
    e.kind = Kind::Constant;
    e.value = q;
    return e;
  }
  static Expr variable(int i) {
    Expr e;
    e.kind = Kind::Var;
    e.var = i;
    return e;
  }
};

/// Minimal infix parser for test functions and field coefficients.
/// Grammar: expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
/// factor := atom ('^' nat)? ; atom := rational | name | '-'factor |
/// '(' expr ')' | ('sin'|'cos') '(' expr ')'.
class ExprParser {
 public:
  ExprParser(std::string text, std::vector<std::string> names)
      : s_(std::move(text)), names_(std::move(names)) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos_) + ": " + why);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }
  Expr parse_expr() {
    Expr acc = parse_term();
    while (true) {
      skip_ws();
      if (eat('+')) {
        Expr rhs = parse_term();
        Expr add; add.kind = Expr::Kind::Add; add.kids = {acc, rhs};
        acc = add;
      } else if (eat('-')) {
        Expr rhs = parse_term();
        Expr neg; neg.kind = Expr::Kind::Mul; neg.kids = {Expr::constant(rat(-1)), rhs};
        Expr add; add.kind = Expr::Kind::Add; add.kids = {acc, neg};
        acc = add;
      } else {
        return acc;
      }
    }
  }
  Expr parse_term() {
    Expr acc = parse_factor();
    while (true) {
      skip_ws();
      if (eat('*')) {
        Expr rhs = parse_factor();
        Expr mul; mul.kind = Expr::Kind::Mul; mul.kids = {acc, rhs};
        acc = mul;
      } else {
        return acc;
      }
    }
  }
  Expr parse_factor() {
    Expr base = parse_atom();
    skip_ws();
    if (eat('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      Expr p; p.kind = Expr::Kind::Pow; p.power = std::stoi(s_.substr(start, pos_ - start));
      p.kids = {base};
      return p;
    }
    return base;
  }
  Expr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (c == '-') {
      ++pos_;
      Expr rhs = parse_factor();
      Expr neg; neg.kind = Expr::Kind::Mul; neg.kids = {Expr::constant(rat(-1)), rhs};
      return neg;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
      return Expr::constant(parse_rational(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "sin" || name == "cos") {
        if (!eat('(')) fail("expected '(' after " + name);
        Expr arg = parse_expr();
        if (!eat(')')) fail("expected ')'");
        Expr e; e.kind = (name == "sin") ? Expr::Kind::Sin : Expr::Kind::Cos; e.kids = {arg};
        return e;
      }
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return Expr::variable(static_cast<int>(i));
      fail("unknown name '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  std::vector<std::string> names_;
  std::size_t pos_ = 0;
};

/// Multi-indices of total order <= 3 in nvars variables, with fast lookup.
class JetTable {
 public:
  explicit JetTable(int nvars) : nvars_(nvars) {
    key_to_id_.assign(1 << (2 * nvars), -1);
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    gen(e, 0, 0);
  }

  int nvars() const { return nvars_; }
  int size() const { return static_cast<int>(exps_.size()); }
  const std::vector<int>& exps(int id) const { return exps_[static_cast<std::size_t>(id)]; }
  int order(int id) const { return orders_[static_cast<std::size_t>(id)]; }

  int find(const std::vector<int>& e) const {  // -1 when order > 3
    int key = 0, total = 0;
    for (int i = nvars_ - 1; i >= 0; --i) {
      total += e[static_cast<std::size_t>(i)];
      key = (key << 2) | e[static_cast<std::size_t>(i)];
    }
    if (total > 3) return -1;
    return key_to_id_[static_cast<std::size_t>(key)];
  }

 private:
  void gen(std::vector<int>& e, int var, int used) {
    if (var == nvars_) {
      int key = 0;
      for (int i = nvars_ - 1; i >= 0; --i) key = (key << 2) | e[static_cast<std::size_t>(i)];
      key_to_id_[static_cast<std::size_t>(key)] = static_cast<int>(exps_.size());
      exps_.push_back(e);
      orders_.push_back(used);
      return;
    }
    for (int k = 0; k + used <= 3; ++k) {
      e[static_cast<std::size_t>(var)] = k;
      gen(e, var + 1, used + k);
    }
    e[static_cast<std::size_t>(var)] = 0;
  }

  int nvars_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> orders_;
  std::vector<int> key_to_id_;
};

template <class T>
T scalar_from_rat(const Rational& q) {
  if constexpr (std::is_same_v<T, double>)
    return q.get_d();
  else
    return q;
}

template <class T>
bool scalar_is_zero(const T& v) {
  if constexpr (std::is_same_v<T, double>)
    return v == 0.0;
  else
    return is_zero(v);
}

/// Truncated Taylor expansion at a point, through total order 3. `valid`
/// tracks how many orders remain trustworthy after derivations.
template <class T>
struct Jet {
  const JetTable* table = nullptr;
  int valid = 3;
  std::vector<T> c;

  Jet() = default;
  explicit Jet(const JetTable& t, int valid_order = 3)
      : table(&t), valid(valid_order), c(static_cast<std::size_t>(t.size()), T(0)) {}

  T value() const { return c[0]; }

  Jet operator+(const Jet& o) const {
    Jet r(*table, std::min(valid, o.valid));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Jet operator-(const Jet& o) const {
    Jet r(*table, std::min(valid, o.valid));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Jet operator*(const Jet& o) const {
    Jet r(*table, std::min(valid, o.valid));
    int nsz = table->size();
    std::vector<int> sum(static_cast<std::size_t>(table->nvars()));
    for (int i = 0; i < nsz; ++i) {
      if (scalar_is_zero(c[static_cast<std::size_t>(i)])) continue;
      for (int j = 0; j < nsz; ++j) {
        if (table->order(i) + table->order(j) > 3) continue;
        if (scalar_is_zero(o.c[static_cast<std::size_t>(j)])) continue;
        for (int v = 0; v < table->nvars(); ++v)
          sum[static_cast<std::size_t>(v)] =
              table->exps(i)[static_cast<std::size_t>(v)] + table->exps(j)[static_cast<std::size_t>(v)];
        int id = table->find(sum);
        if (id >= 0)
          r.c[static_cast<std::size_t>(id)] += c[static_cast<std::size_t>(i)] * o.c[static_cast<std::size_t>(j)];
      }
    }
    return r;
  }
  Jet scaled(const T& s) const {
    Jet r = *this;
    for (auto& x : r.c) x = x * s;
    return r;
  }

  /// d/dx_k; one order of validity is consumed.
  Jet derivative(int k) const {
    Jet r(*table, valid - 1);
    std::vector<int> e(static_cast<std::size_t>(table->nvars()));
    for (int i = 0; i < table->size(); ++i) {
      e = table->exps(i);
      e[static_cast<std::size_t>(k)] += 1;
      int src = table->find(e);
      if (src >= 0)
        r.c[static_cast<std::size_t>(i)] =
            c[static_cast<std::size_t>(src)] * T(e[static_cast<std::size_t>(k)]);
    }
    return r;
  }

  /// the jet minus its constant term
  Jet fractional() const {
    Jet r = *this;
    r.c[0] = T(0);
    return r;
  }
};

template <class T>
Jet<T> jet_constant(const JetTable& t, const T& v) {
  Jet<T> r(t);
  r.c[0] = v;
  return r;
}

template <class T>
Jet<T> jet_variable(const JetTable& t, int var, const T& base) {
  Jet<T> r(t);
  r.c[0] = base;
  std::vector<int> e(static_cast<std::size_t>(t.nvars()), 0);
  e[static_cast<std::size_t>(var)] = 1;
  r.c[static_cast<std::size_t>(t.find(e))] = T(1);
  return r;
}

/// Evaluates an expression into a jet at the given base point.
template <class T>
Jet<T> jet_eval(const Expr& e, const JetTable& t, const std::vector<T>& point) {
  switch (e.kind) {
    case Expr::Kind::Constant:
      return jet_constant(t, scalar_from_rat<T>(e.value));
    case Expr::Kind::Var:
      return jet_variable(t, e.var, point[static_cast<std::size_t>(e.var)]);
    case Expr::Kind::Add: {
      Jet<T> r = jet_eval(e.kids[0], t, point);
      for (std::size_t i = 1; i < e.kids.size(); ++i) r = r + jet_eval(e.kids[i], t, point);
      return r;
    }
    case Expr::Kind::Mul: {
      Jet<T> r = jet_eval(e.kids[0], t, point);
      for (std::size_t i = 1; i < e.kids.size(); ++i) r = r * jet_eval(e.kids[i], t, point);
      return r;
    }
    case Expr::Kind::Pow: {
      Jet<T> base = jet_eval(e.kids[0], t, point);
      Jet<T> r = jet_constant(t, T(1));
      for (int i = 0; i < e.power; ++i) r = r * base;
      return r;
    }
    case Expr::Kind::Sin:
    case Expr::Kind::Cos: {
      if constexpr (std::is_same_v<T, double>) {
        Jet<T> g = jet_eval(e.kids[0], t, point);
        double g0 = g.value();
        Jet<T> h = g.fractional();
        Jet<T> h2 = h * h;
        Jet<T> h3 = h2 * h;
        Jet<T> sin_h = h - h3.scaled(1.0 / 6.0);
        Jet<T> cos_h = jet_constant(t, 1.0) - h2.scaled(0.5);
        if (e.kind == Expr::Kind::Sin)
          return cos_h.scaled(std::sin(g0)) + sin_h.scaled(std::cos(g0));
        return cos_h.scaled(std::cos(g0)) - sin_h.scaled(std::sin(g0));
      } else {
        throw UnsupportedAtom("sin/cos need the floating-point jet mode");
      }
    }
  }
  throw UnsupportedAtom("unreachable expression kind");
}

/// Plain pointwise evaluation (shared by the finite-difference oracle).
inline double eval_double(const Expr& e, const std::vector<double>& x) {
  switch (e.kind) {
    case Expr::Kind::Constant: return e.value.get_d();
    case Expr::Kind::Var: return x[static_cast<std::size_t>(e.var)];
    case Expr::Kind::Add: {
      double s = 0;
      for (const auto& k : e.kids) s += eval_double(k, x);
      return s;
    }
    case Expr::Kind::Mul: {
      double s = 1;
      for (const auto& k : e.kids) s *= eval_double(k, x);
      return s;
    }
    case Expr::Kind::Pow: return std::pow(eval_double(e.kids[0], x), e.power);
    case Expr::Kind::Sin: return std::sin(eval_double(e.kids[0], x));
    case Expr::Kind::Cos: return std::cos(eval_double(e.kids[0], x));
  }
  return 0;
}

/// A coordinate realization of a catalog group: frame fields given by
/// coefficient expressions over the coordinates.
struct CoordModel {
  std::string name;
  GradedFrameSpec spec;  // basic grading; the connection of the Bochner formulas
  std::vector<std::string> coords;
  std::vector<std::vector<Expr>> frame;  // frame[a][k]: coefficient of d/dx_k in E_a
  bool rational_mode = true;

  Expr parse(const std::string& text) const { return ExprParser(text, coords).parse(); }
};

inline std::vector<CoordModel> builtin_models() {
  std::vector<CoordModel> out;
  auto P = [](const CoordModel& m, const std::string& s) { return m.parse(s); };
  {
    CoordModel m;
    m.name = "heisenberg3";
    m.spec = find_builtin("heisenberg3").value();
    m.coords = {"x", "y", "t"};
    m.frame.resize(3);
    m.frame[0] = {P(m, "1"), P(m, "0"), P(m, "-1/2*y")};
    m.frame[1] = {P(m, "0"), P(m, "1"), P(m, "1/2*x")};
    m.frame[2] = {P(m, "0"), P(m, "0"), P(m, "1")};
    out.push_back(std::move(m));
  }
  {
    CoordModel m;
    m.name = "heisenberg5";
    m.spec = find_builtin("heisenberg5").value();
    m.coords = {"x1", "x2", "y1", "y2", "t"};
    m.frame.resize(5);
    m.frame[0] = {P(m, "1"), P(m, "0"), P(m, "0"), P(m, "0"), P(m, "-1/2*y1")};
    m.frame[1] = {P(m, "0"), P(m, "1"), P(m, "0"), P(m, "0"), P(m, "-1/2*y2")};
    m.frame[2] = {P(m, "0"), P(m, "0"), P(m, "1"), P(m, "0"), P(m, "1/2*x1")};
    m.frame[3] = {P(m, "0"), P(m, "0"), P(m, "0"), P(m, "1"), P(m, "1/2*x2")};
    m.frame[4] = {P(m, "0"), P(m, "0"), P(m, "0"), P(m, "0"), P(m, "1")};
    out.push_back(std::move(m));
  }
  {
    CoordModel m;
    m.name = "c3";
    m.spec = find_builtin("c3_basic").value();
    m.coords = {"x", "y", "t", "s"};
    m.frame.resize(4);
    m.frame[0] = {P(m, "1"), P(m, "0"), P(m, "0"), P(m, "0")};
    m.frame[1] = {P(m, "0"), P(m, "1"), P(m, "x"), P(m, "1/2*x^2")};
    m.frame[2] = {P(m, "0"), P(m, "0"), P(m, "1"), P(m, "x")};
    m.frame[3] = {P(m, "0"), P(m, "0"), P(m, "0"), P(m, "1")};
    out.push_back(std::move(m));
  }
  {
    CoordModel m;
    m.name = "sn";
    m.spec = find_builtin("sn").value();
    m.coords = {"x", "y", "t", "s"};
    m.rational_mode = false;
    m.frame.resize(4);
    m.frame[0] = {P(m, "1"), P(m, "0"), P(m, "0"), P(m, "0")};
    m.frame[1] = {P(m, "0"), P(m, "1"), P(m, "sin(x)"), P(m, "-cos(x)")};
    m.frame[2] = {P(m, "0"), P(m, "0"), P(m, "cos(x)"), P(m, "sin(x)")};
    m.frame[3] = {P(m, "0"), P(m, "0"), P(m, "-sin(x)"), P(m, "cos(x)")};
    out.push_back(std::move(m));
  }
  return out;
}

inline std::optional<CoordModel> find_model(const std::string& name) {
  for (auto& m : builtin_models())
    if (m.name == name) return m;
  return std::nullopt;
}

/// All jets of the frame coefficients at one base point, plus field
/// application (one order of jet validity per application).
template <class T>
class PointFrame {
 public:
  PointFrame(const CoordModel& model, const std::vector<T>& point)
      : model_(model), table_(model.spec.dim()), point_(point) {
    int n = model.spec.dim();
    coeff_.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k)
        coeff_[static_cast<std::size_t>(a)].push_back(jet_eval<T>(model.frame[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)], table_, point));
  }

  const JetTable& table() const { return table_; }
  const std::vector<T>& point() const { return point_; }
  int dim() const { return model_.spec.dim(); }

  Jet<T> eval(const Expr& e) const { return jet_eval<T>(e, table_, point_); }

  /// E_a applied to a jet: sum_k e_a^k d/dx_k.
  Jet<T> apply(int a, const Jet<T>& j) const {
    Jet<T> r(table_, j.valid - 1);
    for (int k = 0; k < dim(); ++k)
      r = r + coeff_[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] * j.derivative(k);
    return r;
  }

  /// structure coefficients of [E_a, E_b] in the frame at this point
  std::vector<T> bracket_coefficients(int a, int b) const {
    int n = dim();
    std::vector<T> w(static_cast<std::size_t>(n), T(0));
    for (int k = 0; k < n; ++k) {
      Jet<T> s(table_, 2);
      for (int m = 0; m < n; ++m)
        s = s + coeff_[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] * coeff_[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)].derivative(m) -
            coeff_[static_cast<std::size_t>(b)][static_cast<std::size_t>(m)] * coeff_[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)].derivative(m);
      w[static_cast<std::size_t>(k)] = s.value();
    }
    // solve frame matrix * lambda = bracket vector
    Mat<T> A(n, n);
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < n; ++k) A(k, c) = coeff_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)].value();
    auto sol = solve(A, w);
    if (!sol) throw std::runtime_error("frame fields degenerate at sample point");
    return *sol;
  }

  T frame_determinant() const {
    Mat<T> A(dim(), dim());
    for (int a = 0; a < dim(); ++a)
      for (int k = 0; k < dim(); ++k) A(a, k) = coeff_[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)].value();
    // row reduce and multiply pivots is overkill here; use Leibniz for n <= 5
    std::vector<int> perm(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) perm[static_cast<std::size_t>(i)] = i;
    T det(0);
    int sign = 1;
    std::function<void(int)> rec = [&](int k) {
      if (k == dim()) {
        T prod(sign);
        for (int i = 0; i < dim(); ++i) prod = prod * A(i, perm[static_cast<std::size_t>(i)]);
        det = det + prod;
        return;
      }
      for (int i = k; i < dim(); ++i) {
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(i)]);
        if (i != k) sign = -sign;
        rec(k + 1);
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(i)]);
        if (i != k) sign = -sign;
      }
    };
    rec(0);
    return det;
  }

 private:
  const CoordModel& model_;
  JetTable table_;
  std::vector<T> point_;
  std::vector<std::vector<Jet<T>>> coeff_;
};

/// Pointwise derivative pack of one test function: everything the Bochner and
/// Gamma-form identities consume.
template <class T>
struct FunctionJets {
  Jet<T> f;                            // order 3
  std::vector<Jet<T>> Ef;              // Ef[a]: order 2
  std::vector<std::vector<T>> d2;      // d2[a][b] = E_b E_a f
  std::vector<std::vector<Jet<T>>> Ef2;  // Ef2[a][b]: order-1 jet of E_b(E_a f)
};

template <class T>
FunctionJets<T> function_jets(const PointFrame<T>& pf, const Expr& f) {
  int n = pf.dim();
  FunctionJets<T> out;
  out.f = pf.eval(f);
  out.Ef.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) out.Ef.push_back(pf.apply(a, out.f));
  out.d2.assign(static_cast<std::size_t>(n), std::vector<T>(static_cast<std::size_t>(n), T(0)));
  out.Ef2.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Jet<T> j = pf.apply(b, out.Ef[static_cast<std::size_t>(a)]);
      out.d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = j.value();
      out.Ef2[static_cast<std::size_t>(a)].push_back(std::move(j));
    }
  return out;
}

/// Jet of the horizontal Laplacian of f, valid to order 1.
template <class T>
Jet<T> hlap_jet(const GradedFrameSpec& f, const ConnCoeffs& gamma, const PointFrame<T>& pf,
                const FunctionJets<T>& fj) {
  Jet<T> lap(pf.table(), 1);
  for (int i : f.grade_indices(0)) {
    lap = lap + pf.apply(i, fj.Ef[static_cast<std::size_t>(i)]);
    for (int c = 0; c < f.dim(); ++c) {
      Rational g = gamma.at(i, i, c);
      if (!is_zero(g)) lap = lap - fj.Ef[static_cast<std::size_t>(c)].scaled(scalar_from_rat<T>(g));
    }
  }
  return lap;
}

template <class T>
std::vector<T> hgrad(const GradedFrameSpec& f, const FunctionJets<T>& fj) {
  std::vector<T> g;
  for (int i : f.grade_indices(0)) g.push_back(fj.Ef[static_cast<std::size_t>(i)].value());
  return g;
}

/// Horizontal Hessian: nabla^2 f(E_i, E_j) = E_i(E_j f) - (nabla_{E_i} E_j) f.
template <class T>
Mat<T> hessian(const GradedFrameSpec& f, const ConnCoeffs& gamma, const FunctionJets<T>& fj) {
  std::vector<int> H = f.grade_indices(0);
  Mat<T> h(static_cast<int>(H.size()), static_cast<int>(H.size()));
  for (std::size_t i = 0; i < H.size(); ++i)
    for (std::size_t j = 0; j < H.size(); ++j) {
      T v = fj.d2[static_cast<std::size_t>(H[j])][static_cast<std::size_t>(H[i])];
      for (int c = 0; c < f.dim(); ++c) {
        Rational g = gamma.at(H[i], H[j], c);
        if (!is_zero(g)) v = v - scalar_from_rat<T>(g) * fj.Ef[static_cast<std::size_t>(c)].value();
      }
      h(static_cast<int>(i), static_cast<int>(j)) = v;
    }
  return h;
}

template <class T>
T hlap(const GradedFrameSpec& f, const ConnCoeffs& gamma, const PointFrame<T>& pf,
       const FunctionJets<T>& fj) {
  return hlap_jet(f, gamma, pf, fj).value();
}

/// Residual of the general Bochner formula for F = nabla f and the grade-j
/// projection F_j; identically zero for every smooth f.
template <class T>
T bochner_residual(const GradedFrameSpec& f, const ConnCoeffs& gamma, const TorsionTensor& tor,
                   const TorDerived& td, const RicciData& rc, const PointFrame<T>& pf,
                   const FunctionJets<T>& fj, int grade_j) {
  int n = f.dim();
  std::vector<int> H = f.grade_indices(0);
  auto in_grade = [&](int a) { return f.grade(a) == grade_j; };
  auto R = [&](const Rational& q) { return scalar_from_rat<T>(q); };

  // lhs: (1/2) Delta_0 |F_j|^2
  Jet<T> Gj(pf.table(), 2);
  for (int a = 0; a < n; ++a)
    if (in_grade(a)) Gj = Gj + fj.Ef[static_cast<std::size_t>(a)] * fj.Ef[static_cast<std::size_t>(a)];
  Jet<T> lapG(pf.table(), 0);
  for (int i : H) {
    lapG = lapG + pf.apply(i, pf.apply(i, Gj));
    for (int c = 0; c < n; ++c) {
      Rational g = gamma.at(i, i, c);
      if (!is_zero(g)) lapG = lapG - pf.apply(c, Gj).scaled(R(g));
    }
  }
  T lhs_val = lapG.value() / T(2);

  std::vector<T> F(static_cast<std::size_t>(n)), Fj(static_cast<std::size_t>(n), T(0)),
      F0(static_cast<std::size_t>(n), T(0));
  for (int a = 0; a < n; ++a) {
    F[static_cast<std::size_t>(a)] = fj.Ef[static_cast<std::size_t>(a)].value();
    if (in_grade(a)) Fj[static_cast<std::size_t>(a)] = F[static_cast<std::size_t>(a)];
    if (f.horizontal(a)) F0[static_cast<std::size_t>(a)] = F[static_cast<std::size_t>(a)];
  }

  // Rc(F_j, F_0)
  T rc_term(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      rc_term = rc_term + R(rc.rc(a, b)) * Fj[static_cast<std::size_t>(a)] * F0[static_cast<std::size_t>(b)];

  // |nabla_(0) F_j|^2 with nabla_{E_i} F_j components
  T grad_term(0);
  for (int i : H)
    for (int c = 0; c < n; ++c) {
      T u(0);
      if (in_grade(c)) u = fj.d2[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      for (int a = 0; a < n; ++a)
        if (in_grade(a)) u = u + Fj[static_cast<std::size_t>(a)] * R(gamma.at(i, a, c));
      grad_term = grad_term + u * u;
    }

  // sum_i <E_i, nabla^2 F_0 (F_j, E_i)>: second covariant derivative of the
  // horizontal projection of F, outer direction first
  // u0[i][c]: jets of (nabla_{E_i} F_0)^c, valid order 1
  std::vector<std::vector<Jet<T>>> u0(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) {
      Jet<T> u(pf.table(), 1);
      if (f.horizontal(c)) u = u + fj.Ef2[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      for (int a : H) {
        Rational g = gamma.at(i, a, c);
        if (!is_zero(g)) u = u + fj.Ef[static_cast<std::size_t>(a)].scaled(R(g));
      }
      u0[static_cast<std::size_t>(i)].push_back(std::move(u));
    }
  T hess_term(0);
  for (int z = 0; z < n; ++z) {
    if (scalar_is_zero(Fj[static_cast<std::size_t>(z)])) continue;
    for (int i : H) {
      // (nabla^2 F_0)(E_z, E_i)^i
      T v = pf.apply(z, u0[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]).value();
      for (int c = 0; c < n; ++c) {
        Rational g = gamma.at(z, c, i);
        if (!is_zero(g)) v = v + u0[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].value() * R(g);
      }
      for (int w = 0; w < n; ++w) {
        Rational g = gamma.at(z, i, w);
        if (!is_zero(g)) v = v - R(g) * u0[static_cast<std::size_t>(w)][static_cast<std::size_t>(i)].value();
      }
      hess_term = hess_term + Fj[static_cast<std::size_t>(z)] * v;
    }
  }

  // -2 <nabla_{E_i} F, Tor(E_i, F_j)>
  T tor_term(0);
  for (int i : H)
    for (int c = 0; c < n; ++c) {
      T vF = fj.d2[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      for (int a = 0; a < n; ++a) vF = vF + F[static_cast<std::size_t>(a)] * R(gamma.at(i, a, c));
      T tc(0);
      for (int b = 0; b < n; ++b)
        tc = tc + Fj[static_cast<std::size_t>(b)] * R(tor.at(i, b, c));
      tor_term = tor_term - T(2) * vF * tc;
    }

  // + <F, (nabla_{E_i} Tor)(F_j, E_i)> - <F, TOR2(E_i, E_i, F_j)>
  T nt_term(0), t2_term(0);
  for (int i : H)
    for (int d = 0; d < n; ++d) {
      T s1(0), s2(0);
      for (int z = 0; z < n; ++z) {
        if (scalar_is_zero(Fj[static_cast<std::size_t>(z)])) continue;
        s1 = s1 + Fj[static_cast<std::size_t>(z)] * R(td.nabla_tor.at({i, z, i, d}));
        s2 = s2 + Fj[static_cast<std::size_t>(z)] * R(td.tor2.at(i, i, z, d));
      }
      nt_term = nt_term + F[static_cast<std::size_t>(d)] * s1;
      t2_term = t2_term - F[static_cast<std::size_t>(d)] * s2;
    }

  return lhs_val - (rc_term + grad_term + hess_term + tor_term + nt_term + t2_term);
}

/// Delta_0 applied to a scalar jet (needs two valid orders).
template <class T>
T scalar_hlap(const GradedFrameSpec& f, const ConnCoeffs& gamma, const PointFrame<T>& pf,
              const Jet<T>& G) {
  T out(0);
  for (int i : f.grade_indices(0)) {
    out = out + pf.apply(i, pf.apply(i, G)).value();
    for (int c = 0; c < f.dim(); ++c) {
      Rational g = gamma.at(i, i, c);
      if (!is_zero(g)) out = out - scalar_from_rat<T>(g) * pf.apply(c, G).value();
    }
  }
  return out;
}

/// Residuals of the two strictly-normal Bochner displays; first = horizontal,
/// second = vertical.
template <class T>
std::pair<T, T> bochnerf_residuals(const GradedFrameSpec& f, const ConnCoeffs& gamma,
                                   const TorsionTensor& tor, const SymForm& bg,
                                   const PointFrame<T>& pf, const FunctionJets<T>& fj) {
  int n = f.dim();
  std::vector<int> H = f.grade_indices(0);
  auto R = [&](const Rational& q) { return scalar_from_rat<T>(q); };

  Jet<T> G0(pf.table(), 2), G1(pf.table(), 2);
  for (int a = 0; a < n; ++a) {
    Jet<T> sq = fj.Ef[static_cast<std::size_t>(a)] * fj.Ef[static_cast<std::size_t>(a)];
    if (f.horizontal(a)) G0 = G0 + sq; else G1 = G1 + sq;
  }
  Jet<T> lap = hlap_jet(f, gamma, pf, fj);

  // w1[i][c] = (nabla_{E_i} grad_1 f)^c values
  std::vector<std::vector<T>> w1(static_cast<std::size_t>(n),
                                 std::vector<T>(static_cast<std::size_t>(n), T(0)));
  for (int i : H)
    for (int c = 0; c < n; ++c) {
      T u(0);
      if (!f.horizontal(c)) u = fj.d2[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      for (int a = 0; a < n; ++a)
        if (!f.horizontal(a))
          u = u + fj.Ef[static_cast<std::size_t>(a)].value() * R(gamma.at(i, a, c));
      w1[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = u;
    }

  // horizontal display
  T lhs0 = scalar_hlap(f, gamma, pf, G0) / T(2);
  for (int i : H)
    lhs0 = lhs0 - fj.Ef[static_cast<std::size_t>(i)].value() * pf.apply(i, lap).value();
  T rhs0(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      rhs0 = rhs0 + R(bg.at(a, b)) * fj.Ef[static_cast<std::size_t>(a)].value() *
                        fj.Ef[static_cast<std::size_t>(b)].value();
  for (int i : H)
    for (int j : H) {
      T hij = fj.d2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      T hji = fj.d2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (int c = 0; c < n; ++c) {
        Rational gij = gamma.at(i, j, c), gji = gamma.at(j, i, c);
        if (!is_zero(gij)) hij = hij - R(gij) * fj.Ef[static_cast<std::size_t>(c)].value();
        if (!is_zero(gji)) hji = hji - R(gji) * fj.Ef[static_cast<std::size_t>(c)].value();
      }
      T sym = (hij + hji) / T(2);
      rhs0 = rhs0 + sym * sym;
    }
  for (int i : H)
    for (int c = 0; c < n; ++c) {
      T tc(0);
      for (int b : H)
        tc = tc + fj.Ef[static_cast<std::size_t>(b)].value() * R(tor.at(i, b, c));
      rhs0 = rhs0 - T(2) * w1[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] * tc;
    }

  // vertical display
  T lhs1 = scalar_hlap(f, gamma, pf, G1) / T(2);
  for (int a = 0; a < n; ++a)
    if (!f.horizontal(a))
      lhs1 = lhs1 - fj.Ef[static_cast<std::size_t>(a)].value() * pf.apply(a, lap).value();
  T rhs1(0);
  for (int i : H)
    for (int c = 0; c < n; ++c)
      rhs1 = rhs1 + w1[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] *
                        w1[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];

  return {lhs0 - rhs0, lhs1 - rhs1};
}

template <class T>
struct GammaFormsT {
  T g0, g1, g20, g21;  // Gamma_(0), Gamma_(1), Gamma^2_(0), Gamma^2_(1)
};

template <class T>
GammaFormsT<T> gamma_forms(const GradedFrameSpec& f, const ConnCoeffs& gamma,
                           const PointFrame<T>& pf, const FunctionJets<T>& fj) {
  int n = f.dim();
  Jet<T> G0(pf.table(), 2), G1(pf.table(), 2);
  for (int a = 0; a < n; ++a) {
    Jet<T> sq = fj.Ef[static_cast<std::size_t>(a)] * fj.Ef[static_cast<std::size_t>(a)];
    if (f.horizontal(a)) G0 = G0 + sq; else G1 = G1 + sq;
  }
  Jet<T> lap = hlap_jet(f, gamma, pf, fj);
  GammaFormsT<T> out{G0.value(), G1.value(), T(0), T(0)};
  T cross0(0), cross1(0);
  for (int a = 0; a < n; ++a) {
    T ea_lap = pf.apply(a, lap).value();
    T ea_f = fj.Ef[static_cast<std::size_t>(a)].value();
    if (f.horizontal(a)) cross0 = cross0 + ea_lap * ea_f;
    else cross1 = cross1 + ea_lap * ea_f;
  }
  out.g20 = scalar_hlap(f, gamma, pf, G0) - T(2) * cross0;
  out.g21 = scalar_hlap(f, gamma, pf, G1) - T(2) * cross1;
  return out;
}

/// Gamma_(0)(f, Gamma_(1)(f,f)) - Gamma_(1)(f, Gamma_(0)(f,f)); zero for
/// strictly normal extensions.
template <class T>
T com_check(const GradedFrameSpec& f, const PointFrame<T>& pf, const FunctionJets<T>& fj) {
  int n = f.dim();
  Jet<T> G0(pf.table(), 2), G1(pf.table(), 2);
  for (int a = 0; a < n; ++a) {
    Jet<T> sq = fj.Ef[static_cast<std::size_t>(a)] * fj.Ef[static_cast<std::size_t>(a)];
    if (f.horizontal(a)) G0 = G0 + sq; else G1 = G1 + sq;
  }
  T lhs(0), rhs(0);
  for (int a = 0; a < n; ++a) {
    T ea_f = fj.Ef[static_cast<std::size_t>(a)].value();
    if (f.horizontal(a)) lhs = lhs + ea_f * pf.apply(a, G1).value();
    else rhs = rhs + ea_f * pf.apply(a, G0).value();
  }
  return lhs - rhs;
}

/// Pointwise generalized curvature-dimension inequality with the certified
/// constants (rho1, rho2, kappa).
template <class T>
bool cd_pointwise_check(const GradedFrameSpec& f, const ConnCoeffs& gamma, const PointFrame<T>& pf,
                        const FunctionJets<T>& fj, const Rational& nu, const Rational& rho1,
                        const Rational& rho2, const Rational& kappa, const T& slack = T(0)) {
  if (nu <= 0) throw std::invalid_argument("cd_pointwise_check: nu must be positive");
  GammaFormsT<T> g = gamma_forms(f, gamma, pf, fj);
  Jet<T> lap = hlap_jet(f, gamma, pf, fj);
  T l = lap.value();
  auto R = [&](const Rational& q) { return scalar_from_rat<T>(q); };
  T lhs = g.g20 + R(nu) * g.g21;
  T rhs = l * l / T(f.ranks()[0]) + (R(rho1) - R(kappa) / R(nu)) * g.g0 + R(rho2) * g.g1;
  return lhs - rhs >= -slack;
}

/// Coordinate divergence against tr_0 nabla X for a horizontal field
/// X = sum_i h_i E_i; needs a vertically rigid model whose frame volume is the
/// coordinate volume form.
template <class T>
T divergence_check(const CoordModel& model, const GradedFrameSpec& f, const ConnCoeffs& gamma,
                   const PointFrame<T>& pf, const std::vector<Expr>& h) {
  if (!normality_flags(f).vertically_rigid_for_this_metric)
    throw HypothesisNotMet("divergence identity needs a vertically rigid metric");
  int n = f.dim();
  std::vector<int> H = f.grade_indices(0);
  if (static_cast<int>(h.size()) != static_cast<int>(H.size()))
    throw std::invalid_argument("field needs one coefficient per horizontal frame vector");
  std::vector<Jet<T>> hj;
  hj.reserve(h.size());
  for (const Expr& e : h) hj.push_back(pf.eval(e));

  // coordinate divergence of xi^k = sum_i h_i e_i^k
  T div(0);
  for (int k = 0; k < n; ++k) {
    Jet<T> xik(pf.table(), 3);
    for (std::size_t i = 0; i < H.size(); ++i)
      xik = xik + hj[i] * pf.eval(model.frame[static_cast<std::size_t>(H[i])][static_cast<std::size_t>(k)]);
    div = div + xik.derivative(k).value();
  }

  T tr(0);
  for (std::size_t i = 0; i < H.size(); ++i) {
    tr = tr + pf.apply(H[i], hj[i]).value();
    for (std::size_t j = 0; j < H.size(); ++j)
      tr = tr + hj[j].value() * scalar_from_rat<T>(gamma.at(H[i], H[j], H[i]));
  }
  return div - tr;
}

/// Frame structure coefficients at the point against the algebraic model.
template <class T>
T structure_consistency_error(const GradedFrameSpec& f, const PointFrame<T>& pf) {
  int n = f.dim();
  T worst(0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      std::vector<T> lam = pf.bracket_coefficients(a, b);
      for (int k = 0; k < n; ++k) {
        T diff = lam[static_cast<std::size_t>(k)] - scalar_from_rat<T>(f.sc().c(a, b, k));
        if constexpr (std::is_same_v<T, double>) {
          worst = std::max(worst, std::abs(diff));
        } else {
          worst = std::max(worst, abs_rat(diff));
        }
      }
    }
  return worst;
}

/// Central finite-difference oracle for the horizontal Laplacian, in plain
/// double arithmetic (independent of the jet machinery).
inline double hlap_fd(const CoordModel& model, const GradedFrameSpec& f, const ConnCoeffs& gamma,
                      const Expr& fn, const std::vector<double>& p, double h = 1e-4) {
  int n = f.dim();
  auto field_apply = [&](int a, auto&& g, const std::vector<double>& x) {
    double s = 0;
    for (int k = 0; k < n; ++k) {
      double ek = eval_double(model.frame[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)], x);
      if (ek == 0.0) continue;
      std::vector<double> xp = x, xm = x;
      xp[static_cast<std::size_t>(k)] += h;
      xm[static_cast<std::size_t>(k)] -= h;
      s += ek * (g(xp) - g(xm)) / (2 * h);
    }
    return s;
  };
  auto fval = [&](const std::vector<double>& x) { return eval_double(fn, x); };
  double out = 0;
  for (int i : f.grade_indices(0)) {
    auto Eif = [&](const std::vector<double>& x) { return field_apply(i, fval, x); };
    out += field_apply(i, Eif, p);
    for (int c = 0; c < n; ++c) {
      Rational g = gamma.at(i, i, c);
      if (!is_zero(g)) out -= g.get_d() * field_apply(c, fval, p);
    }
  }
  return out;
}

}  // namespace subrc
