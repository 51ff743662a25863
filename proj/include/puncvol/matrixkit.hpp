#pragma once

// Dense small-matrix calculus: minors, elementary symmetric functions,
// the acceleration-substituted functions sigma_perp, the graph volume of a
// linear map, and the two pointwise comparison functions probed against it.
//
// Sizes in this project never exceed 9x9, so every minor sum is computed by
// exact subset enumeration.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace puncvol::matrixkit {

class SmallMatrix {
 public:
  SmallMatrix(std::size_t rows, std::size_t cols);
  /// Row-major nested initializer, e.g. {{1,0},{0,1}}. Rows must have equal length.
  SmallMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SmallMatrix identity(std::size_t n);
  static SmallMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double max_abs() const;
  bool all_finite() const;

  SmallMatrix transpose() const;
  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b);
  friend bool operator==(const SmallMatrix& a, const SmallMatrix& b) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Calls visit(indices) for every strictly increasing k-subset of {0..n-1},
/// in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(std::span<const std::size_t>)>& visit);

/// LU with partial pivoting. Throws DomainError on non-square input.
double determinant(const SmallMatrix& m);

SmallMatrix submatrix(const SmallMatrix& m, std::span<const std::size_t> rows,
                      std::span<const std::size_t> cols);

/// Sum of principal k x k minors; elem_sym(M, 0) == 1.
double elem_sym(const SmallMatrix& m, std::size_t k);

/// (2n+1)x(2n+1) array a_AB = <nabla_{e_B} v, e_A> in a frame whose last
/// vector is v. Column 2n+1 carries the acceleration; the last row vanishes
/// for a unit field.
class ShapeArray {
 public:
  /// Validates shape (2n+1 square) and the zero-last-row tolerance
  /// 1e-9 * (1 + max|entry|).
  ShapeArray(int n, SmallMatrix a);

  int n() const { return n_; }
  const SmallMatrix& matrix() const { return a_; }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }

  /// The 2n x 2n block a_ij.
  SmallMatrix tangent_block() const;
  /// a_{i,2n+1}, i = 1..2n.
  std::vector<double> acceleration() const;
  double last_row_norm() const;

 private:
  int n_;
  SmallMatrix a_;
};

/// (a_ij) with column l (1-based, 1..2n) replaced by the acceleration column.
SmallMatrix substituted(const ShapeArray& a, std::size_t l);

/// One signed minor contributing to sigma_perp: rows R (0-based, increasing),
/// columns (R \ {l}, then the acceleration column 2n), and its sign.
struct PerpTerm {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  int sign;
};

/// The index sets R with |R| = k, l in R (l 1-based) and their signs
/// (-1)^{#{j in {1..2n} \ R : j > l}}. With this sign the lemma's
/// representative W(k) matches the Pfaffian expansion term by term; for
/// l = 2n every sign is +1. Shared by the numeric and symbolic evaluators.
std::vector<PerpTerm> sigma_perp_terms(int n, std::size_t k, std::size_t l);

/// Sum of the signed terms above. sigma_perp(A, 0, l) == 0. k must be even.
double sigma_perp(const ShapeArray& a, std::size_t k, std::size_t l);

/// Graph volume (1 + sum of all squared k x k minors, k = 1..m)^{1/2}, by
/// explicit enumeration over all row and column subsets.
double graph_volume(const SmallMatrix& m);

/// sqrt(det(I + M^T M)); equal to graph_volume by Cauchy-Binet, far cheaper.
double graph_volume_det(const SmallMatrix& m);

/// sum_{k=0}^{m} C(m,k)/C(2m,2k) * elem_sym(D, 2k) for a nonnegative
/// diagonal D of even size 2m.
double diag_bound_rhs(const SmallMatrix& d);

/// sum_k C(n,k)/C(2n,2k) (|sigma_2k| + |sigma_perp(A, 2k, 2n)|). A probed
/// hypothesis, known to exceed graph_volume on some arrays.
double pointwise_rhs_abs(const ShapeArray& a);

/// sqrt(S1^2 + S2^2) with S1 = sum_k w_k sigma_2k, S2 = sum_k w_k sigma_perp(A, 2k, 2n).
/// This is the maximum over the angle of sin(alpha) S1 + cos(alpha) S2.
double pointwise_rhs_angle(const ShapeArray& a);

/// The two sums S1, S2 used above.
struct WeightedSigmas {
  double tangent;  // S1
  double perp;     // S2
};
WeightedSigmas weighted_sigmas(const ShapeArray& a);

std::string to_string(const SmallMatrix& m);

}  // namespace puncvol::matrixkit
