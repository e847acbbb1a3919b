#pragma once

#include <cmath>
#include <optional>
#include <type_traits>
#include <vector>

#include "subrc/rational.hpp"

namespace subrc {

/// Dense matrix over an exact field (Rational) or double, row-major.
template <class T>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0)) {}

  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

template <class T>
bool entry_is_zero(const T& x) {
  if constexpr (std::is_floating_point_v<T>)
    return std::abs(x) < 1e-13;
  else
    return is_zero(x);
}

/// Row echelon reduction in place; returns pivot column list (rank = size).
template <class T>
std::vector<int> row_reduce(Mat<T>& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int best = -1;
    if constexpr (std::is_floating_point_v<T>) {
      T mx = 0;
      for (int i = row; i < m.rows; ++i)
        if (std::abs(m(i, col)) > mx) { mx = std::abs(m(i, col)); best = i; }
      if (best >= 0 && entry_is_zero(m(best, col))) best = -1;
    } else {
      for (int i = row; i < m.rows; ++i)
        if (!entry_is_zero(m(i, col))) { best = i; break; }
    }
    if (best < 0) continue;
    if (best != row)
      for (int j = 0; j < m.cols; ++j) std::swap(m(row, j), m(best, j));
    T inv = T(1) / m(row, col);
    for (int j = col; j < m.cols; ++j) m(row, j) = m(row, j) * inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == row || entry_is_zero(m(i, col))) continue;
      T f = m(i, col);
      for (int j = col; j < m.cols; ++j) m(i, j) = m(i, j) - f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class T>
int rank(Mat<T> m) {
  return static_cast<int>(row_reduce(m).size());
}

/// Basis of the right nullspace of m (as column vectors).
template <class T>
std::vector<std::vector<T>> nullspace(Mat<T> m) {
  std::vector<int> pivots = row_reduce(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (int free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(m.cols, T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves A x = b for square A; nullopt when singular.
template <class T>
std::optional<std::vector<T>> solve(Mat<T> A, std::vector<T> b) {
  int n = A.rows;
  Mat<T> aug(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = A(i, j);
    aug(i, n) = b[static_cast<std::size_t>(i)];
  }
  std::vector<int> pivots = row_reduce(aug);
  if (static_cast<int>(pivots.size()) != n || pivots.back() == n) return std::nullopt;
  std::vector<T> x(n, T(0));
  for (int r = 0; r < n; ++r) x[pivots[static_cast<std::size_t>(r)]] = aug(r, n);
  return x;
}

}  // namespace subrc
