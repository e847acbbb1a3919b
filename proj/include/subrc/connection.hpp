#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subrc/frame.hpp"
#include "subrc/tensor.hpp"

namespace subrc {

struct InvalidGrading : std::runtime_error {
  explicit InvalidGrading(const std::string& what) : std::runtime_error(what) {}
};

/// B(X,Y,Z) = (L_Z g)(X,Y); with a constant orthonormal frame this reduces to
/// <[X,Z],Y> + <[Y,Z],X>.
struct BTensor {
  int n = 0;
  std::vector<Rational> b;

  BTensor() = default;
  explicit BTensor(int dim) : n(dim), b(static_cast<std::size_t>(dim) * dim * dim, Rational(0)) {}

  Rational& at(int x, int y, int z) { return b[(static_cast<std::size_t>(x) * n + y) * n + z]; }
  const Rational& at(int x, int y, int z) const { return b[(static_cast<std::size_t>(x) * n + y) * n + z]; }
};

inline BTensor b_tensor(const GradedFrameSpec& f) {
  int n = f.dim();
  BTensor B(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) B.at(x, y, z) = f.sc().c(x, z, y) + f.sc().c(y, z, x);
  return B;
}

/// Restriction B^(j): nonzero only on Vj x Vj x (complement of Vj).
inline Rational b_restricted(const GradedFrameSpec& f, const BTensor& B, int j, int x, int y, int z) {
  if (f.grade(x) != j || f.grade(y) != j || f.grade(z) == j) return Rational(0);
  return B.at(x, y, z);
}

/// C^(j) raising: <C^(j)(X,Y), Z> = B^(j)(X, Z, Y) for Z in Vj.
inline Tensor c_tensor(const GradedFrameSpec& f, int j) {
  int n = f.dim();
  BTensor B = b_tensor(f);
  Tensor C(n, {'l', 'l', 'u'});
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) C.at({x, y, z}) = b_restricted(f, B, j, x, z, y);
  return C;
}

/// j-trace: tr_j B^(j)(Z) = sum_i B^(j)(E_i, E_i, Z) over a Vj frame.
inline std::vector<Rational> trace_bj(const GradedFrameSpec& f, int j) {
  int n = f.dim();
  BTensor B = b_tensor(f);
  std::vector<Rational> tr(static_cast<std::size_t>(n), Rational(0));
  for (int z = 0; z < n; ++z)
    for (int i : f.grade_indices(j)) tr[static_cast<std::size_t>(z)] += b_restricted(f, B, j, i, i, z);
  return tr;
}

struct NormalityFlags {
  std::vector<bool> j_normal;  // per j = 0..r
  bool strictly_normal = false;
  std::vector<Rational> rigidity_form;  // the 1-form R_g on the frame
  bool vertically_rigid_for_this_metric = false;  // metric-specific flag
};

inline NormalityFlags normality_flags(const GradedFrameSpec& f) {
  int n = f.dim(), r = f.r();
  BTensor B = b_tensor(f);
  NormalityFlags out;
  out.j_normal.assign(static_cast<std::size_t>(r) + 1, true);
  for (int j = 0; j <= r; ++j)
    for (int x : f.grade_indices(j))
      for (int y : f.grade_indices(j))
        for (int z = 0; z < n; ++z)
          if (f.grade(z) != j && !is_zero(B.at(x, y, z))) out.j_normal[static_cast<std::size_t>(j)] = false;
  out.strictly_normal = true;
  for (bool b : out.j_normal) out.strictly_normal = out.strictly_normal && b;
  out.rigidity_form.assign(static_cast<std::size_t>(n), Rational(0));
  for (int j = 1; j <= r; ++j) {
    std::vector<Rational> tr = trace_bj(f, j);
    for (int k : f.grade_indices(0)) out.rigidity_form[static_cast<std::size_t>(k)] += tr[static_cast<std::size_t>(k)];
  }
  out.vertically_rigid_for_this_metric = true;
  for (const auto& v : out.rigidity_form)
    if (!is_zero(v)) out.vertically_rigid_for_this_metric = false;
  return out;
}

/// The canonical connection: constant-metric Koszul within each grade,
/// bracket projection plus half the C-tensor across grades.
inline ConnCoeffs canonical_connection(const GradedFrameSpec& f) {
  if (!validate_algebra(f.sc()).pass()) throw InvalidGrading("structure constants fail algebra axioms");
  if (!validate_grading(f).all_valid()) throw InvalidGrading("grading axioms fail");
  int n = f.dim();
  const StructureConstants& sc = f.sc();
  BTensor B = b_tensor(f);
  ConnCoeffs gamma(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int j = f.grade(b);
      for (int c : f.grade_indices(j)) {
        if (f.grade(a) == j)
          gamma.at(a, b, c) = (sc.c(a, b, c) + sc.c(c, a, b) + sc.c(c, b, a)) / 2;
        else
          gamma.at(a, b, c) = sc.c(a, b, c) + b_restricted(f, B, j, b, c, a) / 2;
      }
    }
  return gamma;
}

inline TorsionTensor torsion(const GradedFrameSpec& f, const ConnCoeffs& gamma) {
  int n = f.dim();
  TorsionTensor tor(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        tor.at(a, b, c) = gamma.at(a, b, c) - gamma.at(b, a, c) - f.sc().c(a, b, c);
  return tor;
}

/// Closed forms from the worked two-block example (basic grading), kept as an
/// independent oracle for the general construction.
inline std::pair<ConnCoeffs, TorsionTensor> example_bg_connection(const GradedFrameSpec& f) {
  if (f.r() != 1) throw InvalidGrading("closed forms apply to the basic grading only");
  int n = f.dim();
  const StructureConstants& sc = f.sc();
  ConnCoeffs gamma(n);
  TorsionTensor tor(n);
  std::vector<int> H = f.grade_indices(0), V = f.grade_indices(1);
  for (int i : H)
    for (int j : H) {
      for (int k : H) gamma.at(i, j, k) = (sc.c(i, j, k) + sc.c(k, i, j) + sc.c(k, j, i)) / 2;
      for (int a : V) tor.at(i, j, a) = -sc.c(i, j, a);
    }
  for (int b : V)
    for (int j : H)
      for (int k : H) gamma.at(b, j, k) = (sc.c(k, b, j) - sc.c(j, b, k)) / 2;
  for (int j : H)
    for (int b : V)
      for (int a : V) gamma.at(j, b, a) = (sc.c(j, b, a) - sc.c(j, a, b)) / 2;
  for (int cdx : V)
    for (int b : V) {
      for (int a : V) gamma.at(cdx, b, a) = (sc.c(cdx, b, a) + sc.c(a, cdx, b) + sc.c(a, b, cdx)) / 2;
      for (int k : H) tor.at(cdx, b, k) = -sc.c(cdx, b, k);
    }
  for (int j : H)
    for (int b : V) {
      for (int k : H) {
        tor.at(j, b, k) = -(sc.c(k, b, j) + sc.c(j, b, k)) / 2;
        tor.at(b, j, k) = -tor.at(j, b, k);
      }
      for (int a : V) {
        tor.at(j, b, a) = -(sc.c(j, b, a) + sc.c(j, a, b)) / 2;
        tor.at(b, j, a) = -tor.at(j, b, a);
      }
    }
  return {gamma, tor};
}

struct AxiomReport {
  bool metric_compatible = true;
  bool grades_parallel = true;
  bool torsion_in_complement = true;
  bool torsion_symmetry = true;
  std::string first_violation;
  bool ok() const {
    return metric_compatible && grades_parallel && torsion_in_complement && torsion_symmetry;
  }
};

/// Exact check of the four defining properties of the canonical connection.
inline AxiomReport verify_axioms(const GradedFrameSpec& f, const ConnCoeffs& gamma,
                                 const TorsionTensor& tor) {
  AxiomReport rep;
  int n = f.dim();
  auto note = [&](const std::string& s) {
    if (rep.first_violation.empty()) rep.first_violation = s;
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        if (!is_zero(gamma.at(a, b, c) + gamma.at(a, c, b)) && rep.metric_compatible) {
          rep.metric_compatible = false;
          note("metric compatibility at (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
               "," + std::to_string(c + 1) + ")");
        }
        if (f.grade(b) != f.grade(c) && !is_zero(gamma.at(a, b, c)) && rep.grades_parallel) {
          rep.grades_parallel = false;
          note("grade preservation at (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
               "," + std::to_string(c + 1) + ")");
        }
        if (f.grade(a) == f.grade(b) && f.grade(c) == f.grade(a) && !is_zero(tor.at(a, b, c)) &&
            rep.torsion_in_complement) {
          rep.torsion_in_complement = false;
          note("Tor(Vj,Vj) escapes the complement at (" + std::to_string(a + 1) + "," +
               std::to_string(b + 1) + ")");
        }
        if (f.grade(a) == f.grade(c) && tor.at(a, b, c) != tor.at(c, b, a) && rep.torsion_symmetry) {
          rep.torsion_symmetry = false;
          note("torsion symmetry at (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," +
               std::to_string(c + 1) + ")");
        }
      }
  return rep;
}

/// All subgrading connections agree on arguments of grade < min of the two
/// grading depths; in particular on horizontal vector fields.
inline bool grading_independence_check(const GradedFrameSpec& f) {
  if (f.r() < 2) return true;  // vacuous
  std::vector<GradedFrameSpec> gradings;
  for (int k = 1; k < f.r(); ++k) gradings.push_back(subgrading(f, k));
  gradings.push_back(f);
  std::vector<ConnCoeffs> conns;
  for (const auto& g : gradings) conns.push_back(canonical_connection(g));
  int n = f.dim();
  for (std::size_t p = 0; p < conns.size(); ++p)
    for (std::size_t q = p + 1; q < conns.size(); ++q) {
      int depth = static_cast<int>(std::min(p, q)) + 1;  // grades 0..depth-1 kept intact
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (f.grade(b) >= depth) continue;
          for (int c = 0; c < n; ++c)
            if (conns[p].at(a, b, c) != conns[q].at(a, b, c)) return false;
        }
    }
  return true;
}

inline Tensor torsion_as_tensor(const TorsionTensor& tor) {
  Tensor t(tor.n, {'l', 'l', 'u'});
  t.data = tor.t;
  return t;
}

}  // namespace subrc
