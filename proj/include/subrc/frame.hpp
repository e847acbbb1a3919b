#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrc/linalg.hpp"
#include "subrc/rational.hpp"

namespace subrc {

struct BadIndex : std::out_of_range {
  explicit BadIndex(const std::string& what) : std::out_of_range(what) {}
};

/// Constant structure constants of a frame: [E_a, E_b] = sum_k c(a,b,k) E_k.
/// Indices are 0-based internally.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n) : n_(n), c_(static_cast<std::size_t>(n) * n * n, Rational(0)) {}

  int dim() const { return n_; }

  const Rational& c(int a, int b, int k) const { return c_[idx(a, b, k)]; }

  /// Sets [E_a, E_b] component and the antisymmetric mirror.
  void set_bracket(int a, int b, int k, const Rational& v) {
    if (a == b && !is_zero(v)) throw BadIndex("bracket of a frame vector with itself");
    c_[idx(a, b, k)] = v;
    c_[idx(b, a, k)] = -v;
  }

  /// [u, v] for coefficient vectors.
  std::vector<Rational> bracket(const std::vector<Rational>& u, const std::vector<Rational>& v) const {
    std::vector<Rational> w(static_cast<std::size_t>(n_), Rational(0));
    for (int a = 0; a < n_; ++a) {
      if (is_zero(u[static_cast<std::size_t>(a)])) continue;
      for (int b = 0; b < n_; ++b) {
        if (is_zero(v[static_cast<std::size_t>(b)])) continue;
        Rational f = u[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
        for (int k = 0; k < n_; ++k) w[static_cast<std::size_t>(k)] += f * c(a, b, k);
      }
    }
    return w;
  }

 private:
  std::size_t idx(int a, int b, int k) const {
    if (a < 0 || a >= n_ || b < 0 || b >= n_ || k < 0 || k >= n_) throw BadIndex("structure constant index");
    return (static_cast<std::size_t>(a) * n_ + b) * n_ + k;
  }

  int n_ = 0;
  std::vector<Rational> c_;
};

struct AlgebraValidation {
  bool antisymmetry_ok = true;
  bool jacobi_ok = true;
  int fail_a = -1, fail_b = -1, fail_c = -1;  // first offending triple
  std::string detail;
  bool pass() const { return antisymmetry_ok && jacobi_ok; }
};

/// Exact antisymmetry and Jacobi residual check.
inline AlgebraValidation validate_algebra(const StructureConstants& sc) {
  AlgebraValidation v;
  int n = sc.dim();
  for (int a = 0; a < n && v.antisymmetry_ok; ++a)
    for (int b = 0; b < n && v.antisymmetry_ok; ++b)
      for (int k = 0; k < n; ++k)
        if (sc.c(a, b, k) != -sc.c(b, a, k)) {
          v.antisymmetry_ok = false;
          v.fail_a = a; v.fail_b = b; v.fail_c = k;
          v.detail = "antisymmetry fails at (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")";
          break;
        }
  if (!v.antisymmetry_ok) return v;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          Rational r(0);
          for (int e = 0; e < n; ++e)
            r += sc.c(a, b, e) * sc.c(e, c, d) + sc.c(b, c, e) * sc.c(e, a, d) +
                 sc.c(c, a, e) * sc.c(e, b, d);
          if (!is_zero(r)) {
            v.jacobi_ok = false;
            v.fail_a = a; v.fail_b = b; v.fail_c = c;
            v.detail = "Jacobi fails at (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                       "," + std::to_string(c + 1) + ")";
            return v;
          }
        }
      }
  return v;
}

/// Graded orthonormal frame model of an sRC-manifold. ranks = (n_0, ..., n_r):
/// frame indices 0..n_0-1 span HM, the next n_1 span V1, and so on. The frame
/// is declared orthonormal, so the metric is the identity in these indices.
class GradedFrameSpec {
 public:
  GradedFrameSpec() = default;
  GradedFrameSpec(std::string name, StructureConstants sc, std::vector<int> ranks)
      : name_(std::move(name)), sc_(std::move(sc)), ranks_(std::move(ranks)) {
    if (ranks_.size() < 2) throw BadIndex("grading needs at least (n0, n1)");
    int total = std::accumulate(ranks_.begin(), ranks_.end(), 0);
    if (total != sc_.dim()) throw BadIndex("ranks do not partition the frame");
    for (int r : ranks_)
      if (r <= 0) throw BadIndex("grading ranks must be positive");
    grade_.resize(static_cast<std::size_t>(sc_.dim()));
    int g = 0, left = ranks_[0];
    for (int i = 0; i < sc_.dim(); ++i) {
      if (left == 0) { ++g; left = ranks_[static_cast<std::size_t>(g)]; }
      grade_[static_cast<std::size_t>(i)] = g;
      --left;
    }
  }

  const std::string& name() const { return name_; }
  const StructureConstants& sc() const { return sc_; }
  int dim() const { return sc_.dim(); }
  const std::vector<int>& ranks() const { return ranks_; }
  int r() const { return static_cast<int>(ranks_.size()) - 1; }
  int grade(int i) const { return grade_[static_cast<std::size_t>(i)]; }
  int h_dim() const { return ranks_[0]; }
  int v_dim() const { return dim() - ranks_[0]; }
  bool horizontal(int i) const { return grade(i) == 0; }

  std::vector<int> grade_indices(int j) const {
    std::vector<int> out;
    for (int i = 0; i < dim(); ++i)
      if (grade(i) == j) out.push_back(i);
    return out;
  }

 private:
  std::string name_;
  StructureConstants sc_;
  std::vector<int> ranks_;
  std::vector<int> grade_;
};

struct GradingReport {
  std::vector<bool> grading_valid;  // per j = 0..r
  std::vector<bool> j_regular;      // per j = 0..r
  bool equiregular = false;
  bool bracket_generating = false;
  bool vm_integrable = false;
  bool all_valid() const {
    for (bool b : grading_valid)
      if (!b) return false;
    return true;
  }
};

/// Exact span computations for the grading axioms, regularity, bracket
/// generation and VM integrability.
inline GradingReport validate_grading(const GradedFrameSpec& f) {
  GradingReport rep;
  int n = f.dim(), r = f.r();
  const StructureConstants& sc = f.sc();
  rep.grading_valid.assign(static_cast<std::size_t>(r) + 1, true);
  rep.j_regular.assign(static_cast<std::size_t>(r) + 1, true);

  std::vector<int> h = f.grade_indices(0);
  for (int j = 0; j <= r; ++j) {
    // [HM, Vj] must land in HM + Vj + V(j+1)
    for (int i : h)
      for (int b : f.grade_indices(j))
        for (int k = 0; k < n; ++k) {
          int gk = f.grade(k);
          if (gk != 0 && gk != j && gk != j + 1 && !is_zero(sc.c(i, b, k)))
            rep.grading_valid[static_cast<std::size_t>(j)] = false;
        }
    // j-regular: V(j+1)-components of [HM, Vj] span V(j+1), and the bracket
    // span meets HM + Vj only at zero
    std::vector<int> next = (j + 1 <= r) ? f.grade_indices(j + 1) : std::vector<int>{};
    std::vector<std::vector<Rational>> brackets;
    for (int i : h)
      for (int b : f.grade_indices(j)) {
        if (j == 0 && b <= i) continue;  // avoid duplicate [H,H] pairs
        std::vector<Rational> v(static_cast<std::size_t>(n), Rational(0));
        bool nonzero = false;
        for (int k = 0; k < n; ++k) {
          v[static_cast<std::size_t>(k)] = sc.c(i, b, k);
          nonzero = nonzero || !is_zero(sc.c(i, b, k));
        }
        if (nonzero) brackets.push_back(std::move(v));
      }
    Mat<Rational> full(static_cast<int>(brackets.size()), n);
    Mat<Rational> proj(static_cast<int>(brackets.size()), static_cast<int>(next.size()));
    for (std::size_t row = 0; row < brackets.size(); ++row) {
      for (int k = 0; k < n; ++k) full(static_cast<int>(row), k) = brackets[row][static_cast<std::size_t>(k)];
      for (std::size_t col = 0; col < next.size(); ++col)
        proj(static_cast<int>(row), static_cast<int>(col)) = brackets[row][static_cast<std::size_t>(next[col])];
    }
    int rank_full = rank(full);
    int rank_proj = next.empty() ? 0 : rank(proj);
    rep.j_regular[static_cast<std::size_t>(j)] =
        rep.grading_valid[static_cast<std::size_t>(j)] &&
        rank_proj == static_cast<int>(next.size()) && rank_full == rank_proj;
  }
  rep.equiregular = true;
  for (bool b : rep.j_regular) rep.equiregular = rep.equiregular && b;

  // bracket generation by span saturation from HM
  std::vector<std::vector<Rational>> span;
  for (int i : h) {
    std::vector<Rational> e(static_cast<std::size_t>(n), Rational(0));
    e[static_cast<std::size_t>(i)] = 1;
    span.push_back(std::move(e));
  }
  auto span_rank = [&](const std::vector<std::vector<Rational>>& vs) {
    Mat<Rational> m(static_cast<int>(vs.size()), n);
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (int k = 0; k < n; ++k) m(static_cast<int>(i), k) = vs[i][static_cast<std::size_t>(k)];
    return rank(m);
  };
  int cur = span_rank(span);
  while (true) {
    std::vector<std::vector<Rational>> next_span = span;
    std::vector<Rational> he(static_cast<std::size_t>(n), Rational(0));
    for (int i : h) {
      std::fill(he.begin(), he.end(), Rational(0));
      he[static_cast<std::size_t>(i)] = 1;
      for (const auto& v : span) next_span.push_back(sc.bracket(he, v));
    }
    int nr = span_rank(next_span);
    span = std::move(next_span);
    if (nr == cur) break;
    cur = nr;
  }
  rep.bracket_generating = (cur == n);

  rep.vm_integrable = true;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (f.horizontal(a) || f.horizontal(b)) continue;
      for (int k : h)
        if (!is_zero(sc.c(a, b, k))) rep.vm_integrable = false;
    }
  return rep;
}

/// Merges ranks k, k+1, ..., r into one final block (Remark on subgradings).
inline GradedFrameSpec subgrading(const GradedFrameSpec& f, int k) {
  if (k < 1 || k >= f.r()) throw BadIndex("subgrading index must satisfy 1 <= k < r");
  std::vector<int> ranks(f.ranks().begin(), f.ranks().begin() + k);
  int rest = 0;
  for (std::size_t j = static_cast<std::size_t>(k); j < f.ranks().size(); ++j) rest += f.ranks()[j];
  ranks.push_back(rest);
  return GradedFrameSpec(f.name(), f.sc(), ranks);
}

inline GradedFrameSpec basic_grading(const GradedFrameSpec& f) {
  return f.r() == 1 ? f : subgrading(f, 1);
}

/// Built-in frame specifications used throughout the paper's examples.
inline std::vector<GradedFrameSpec> builtin_catalog() {
  std::vector<GradedFrameSpec> out;
  {
    StructureConstants sc(3);
    out.emplace_back("abelian3", sc, std::vector<int>{2, 1});
  }
  {
    StructureConstants sc(3);  // [X,Y] = T
    sc.set_bracket(0, 1, 2, rat(1));
    out.emplace_back("heisenberg3", sc, std::vector<int>{2, 1});
  }
  {
    StructureConstants sc(5);  // [X1,Y1] = [X2,Y2] = T
    sc.set_bracket(0, 2, 4, rat(1));
    sc.set_bracket(1, 3, 4, rat(1));
    out.emplace_back("heisenberg5", sc, std::vector<int>{4, 1});
  }
  {
    StructureConstants sc(4);  // [X,Y] = T, [X,T] = S
    sc.set_bracket(0, 1, 2, rat(1));
    sc.set_bracket(0, 2, 3, rat(1));
    out.emplace_back("c3", sc, std::vector<int>{2, 1, 1});
    out.emplace_back("c3_basic", sc, std::vector<int>{2, 2});
  }
  {
    StructureConstants sc(4);  // [X,Y] = T = -[X,S], [X,T] = S
    sc.set_bracket(0, 1, 2, rat(1));
    sc.set_bracket(0, 3, 2, rat(-1));
    sc.set_bracket(0, 2, 3, rat(1));
    out.emplace_back("sn", sc, std::vector<int>{2, 2});
  }
  {
    StructureConstants sc(3);  // [X,Y] = T, [Y,T] = X, [T,X] = Y
    sc.set_bracket(0, 1, 2, rat(1));
    sc.set_bracket(1, 2, 0, rat(1));
    sc.set_bracket(2, 0, 1, rat(1));
    out.emplace_back("su2", sc, std::vector<int>{2, 1});
  }
  {
    StructureConstants sc(5);  // filiform step 4: [X,Y] = T1, [X,T1] = T2, [X,T2] = T3
    sc.set_bracket(0, 1, 2, rat(1));
    sc.set_bracket(0, 2, 3, rat(1));
    sc.set_bracket(0, 3, 4, rat(1));
    out.emplace_back("carnot5", sc, std::vector<int>{2, 1, 1, 1});
  }
  return out;
}

inline std::optional<GradedFrameSpec> find_builtin(const std::string& name) {
  for (auto& f : builtin_catalog())
    if (f.name() == name) return f;
  return std::nullopt;
}

}  // namespace subrc
