#pragma once

// Small dense linear algebra over any numeric carrier (row-major storage).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tmlift/field.hpp"

namespace tmlift {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// In-place LU with partial pivoting (pivot chosen on plain values).
// Returns the permutation sign, or 0 when a pivot is exactly zero.
template <class T>
int lu_decompose(std::vector<T>& a, std::size_t n, std::vector<std::size_t>& perm) {
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(value_of(a[k * n + k]));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(value_of(a[r * n + k]));
      if (v > best) {
        best = v;
        p = r;
      }
    }
    if (best == 0.0) return 0;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
      std::swap(perm[k], perm[p]);
      sign = -sign;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const T f = a[r * n + k] / a[k * n + k];
      a[r * n + k] = f;
      for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= f * a[k * n + c];
    }
  }
  return sign;
}

}  // namespace detail

template <class T>
T determinant(std::vector<T> a, std::size_t n) {
  if (a.size() != n * n) throw DimensionError("determinant: matrix size mismatch");
  if (n == 0) return T(1.0);
  std::vector<std::size_t> perm;
  const int sign = detail::lu_decompose(a, n, perm);
  if (sign == 0) return T(0.0);
  T det = T(static_cast<double>(sign));
  for (std::size_t k = 0; k < n; ++k) det *= a[k * n + k];
  return det;
}

/// Inverse of an n x n matrix; throws SingularMatrixError when a pivot
/// falls below `rel_tol` times the largest entry.
template <class T>
std::vector<T> inverse(std::vector<T> a, std::size_t n, double rel_tol = 1e-14) {
  if (a.size() != n * n) throw DimensionError("inverse: matrix size mismatch");
  double scale = 0.0;
  for (const auto& v : a) scale = std::max(scale, std::abs(value_of(v)));
  std::vector<std::size_t> perm;
  if (detail::lu_decompose(a, n, perm) == 0 || scale == 0.0)
    throw SingularMatrixError("matrix is singular");
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(value_of(a[k * n + k])) <= rel_tol * scale)
      throw SingularMatrixError("matrix is numerically singular");

  std::vector<T> inv(n * n, T(0.0));
  for (std::size_t col = 0; col < n; ++col) {
    // Solve L U x = P e_col.
    std::vector<T> y(n, T(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      T s = T(perm[i] == col ? 1.0 : 0.0);
      for (std::size_t j = 0; j < i; ++j) s -= a[i * n + j] * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      T s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * inv[j * n + col];
      inv[ii * n + col] = s / a[ii * n + ii];
    }
  }
  return inv;
}

}  // namespace tmlift
