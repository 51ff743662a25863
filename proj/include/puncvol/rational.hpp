#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace puncvol {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact binomial coefficient C(n, k); zero when k > n.
inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// C(n,k) / C(2n,2k), the weight attached to the order-2k symmetric functions.
inline Rational sigma_weight(unsigned n, unsigned k) {
  return Rational(binomial(n, k), binomial(2 * n, 2 * k));
}

inline double sigma_weight_value(unsigned n, unsigned k) {
  return sigma_weight(n, k).convert_to<double>();
}

}  // namespace puncvol
