#pragma once

// Small dense-vector helpers for ambient coordinates.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace puncvol {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec scaled(std::span<const double> x, double s) {
  Vec r(x.begin(), x.end());
  for (double& v : r) v *= s;
  return r;
}

inline Vec unit_vector(std::size_t dim, std::size_t i) {
  Vec e(dim, 0.0);
  e[i] = 1.0;
  return e;
}

}  // namespace puncvol
