#include "puncvol/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "puncvol/errors.hpp"
#include "puncvol/rational.hpp"

namespace puncvol::matrixkit {

SmallMatrix::SmallMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw DomainError("SmallMatrix: empty shape");
}

SmallMatrix::SmallMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DomainError("SmallMatrix: empty shape");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("SmallMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

SmallMatrix SmallMatrix::identity(std::size_t n) {
  SmallMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SmallMatrix SmallMatrix::diagonal(std::span<const double> d) {
  SmallMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

double SmallMatrix::max_abs() const {
  double r = 0.0;
  for (double x : data_) r = std::max(r, std::abs(x));
  return r;
}

bool SmallMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

SmallMatrix SmallMatrix::transpose() const {
  SmallMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.cols_ != b.rows_) throw DomainError("SmallMatrix: product shape mismatch");
  SmallMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(std::span<const std::size_t>)>& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(idx);
    // advance to the next combination
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double determinant(const SmallMatrix& m) {
  if (!m.square()) throw DomainError("determinant: matrix is not square");
  const std::size_t n = m.rows();
  std::vector<double> a(m.data().begin(), m.data().end());
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      det = -det;
    }
    const double p = a[c * n + c];
    det *= p;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / p;
      if (f == 0.0) continue;
      for (std::size_t j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

SmallMatrix submatrix(const SmallMatrix& m, std::span<const std::size_t> rows,
                      std::span<const std::size_t> cols) {
  SmallMatrix s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = m(rows[i], cols[j]);
  return s;
}

double elem_sym(const SmallMatrix& m, std::size_t k) {
  if (!m.square()) throw DomainError("elem_sym: matrix is not square");
  if (k > m.rows()) throw DomainError("elem_sym: order exceeds matrix size");
  if (k == 0) return 1.0;
  double sum = 0.0;
  for_each_subset(m.rows(), k, [&](std::span<const std::size_t> r) {
    sum += determinant(submatrix(m, r, r));
  });
  return sum;
}

ShapeArray::ShapeArray(int n, SmallMatrix a) : n_(n), a_(std::move(a)) {
  if (n < 1) throw DomainError("ShapeArray: n must be >= 1");
  const auto size = static_cast<std::size_t>(2 * n + 1);
  if (a_.rows() != size || a_.cols() != size)
    throw DomainError("ShapeArray: expected a (2n+1)x(2n+1) array");
  if (!a_.all_finite()) throw DomainError("ShapeArray: non-finite entry");
  if (last_row_norm() > 1e-9 * (1.0 + a_.max_abs()))
    throw NumericError("ShapeArray: last row is not zero (field not unit?)");
}

SmallMatrix ShapeArray::tangent_block() const {
  const auto m = static_cast<std::size_t>(2 * n_);
  SmallMatrix b(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) b(i, j) = a_(i, j);
  return b;
}

std::vector<double> ShapeArray::acceleration() const {
  const auto m = static_cast<std::size_t>(2 * n_);
  std::vector<double> acc(m);
  for (std::size_t i = 0; i < m; ++i) acc[i] = a_(i, m);
  return acc;
}

double ShapeArray::last_row_norm() const {
  const std::size_t last = a_.rows() - 1;
  double s = 0.0;
  for (std::size_t j = 0; j < a_.cols(); ++j) s += a_(last, j) * a_(last, j);
  return std::sqrt(s);
}

SmallMatrix substituted(const ShapeArray& a, std::size_t l) {
  const auto m = static_cast<std::size_t>(2 * a.n());
  if (l < 1 || l > m) throw DomainError("substituted: column index out of range");
  SmallMatrix s = a.tangent_block();
  for (std::size_t i = 0; i < m; ++i) s(i, l - 1) = a(i, m);
  return s;
}

std::vector<PerpTerm> sigma_perp_terms(int n, std::size_t k, std::size_t l) {
  const auto m = static_cast<std::size_t>(2 * n);
  if (k % 2 != 0) throw DomainError("sigma_perp: order must be even");
  if (k > m) throw DomainError("sigma_perp: order exceeds 2n");
  if (l < 1 || l > m) throw DomainError("sigma_perp: column index out of range");
  std::vector<PerpTerm> terms;
  if (k == 0) return terms;
  const std::size_t l0 = l - 1;
  for_each_subset(m, k, [&](std::span<const std::size_t> r) {
    if (std::find(r.begin(), r.end(), l0) == r.end()) return;
    PerpTerm t;
    t.rows.assign(r.begin(), r.end());
    for (std::size_t i : r)
      if (i != l0) t.cols.push_back(i);
    t.cols.push_back(m);
    // count complement indices above l
    std::size_t above = 0;
    for (std::size_t j = l0 + 1; j < m; ++j)
      if (std::find(r.begin(), r.end(), j) == r.end()) ++above;
    t.sign = (above % 2 == 0) ? 1 : -1;
    terms.push_back(std::move(t));
  });
  return terms;
}

double sigma_perp(const ShapeArray& a, std::size_t k, std::size_t l) {
  double sum = 0.0;
  for (const auto& t : sigma_perp_terms(a.n(), k, l))
    sum += t.sign * determinant(submatrix(a.matrix(), t.rows, t.cols));
  return sum;
}

double graph_volume(const SmallMatrix& m) {
  double s = 1.0;
  const std::size_t kmax = std::min(m.rows(), m.cols());
  for (std::size_t k = 1; k <= kmax; ++k) {
    for_each_subset(m.rows(), k, [&](std::span<const std::size_t> r) {
      for_each_subset(m.cols(), k, [&](std::span<const std::size_t> c) {
        const double d = determinant(submatrix(m, r, c));
        s += d * d;
      });
    });
  }
  return std::sqrt(s);
}

double graph_volume_det(const SmallMatrix& m) {
  SmallMatrix g = m.transpose() * m;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += 1.0;
  return std::sqrt(determinant(g));
}

double diag_bound_rhs(const SmallMatrix& d) {
  if (!d.square() || d.rows() % 2 != 0)
    throw DomainError("diag_bound_rhs: expected an even-size square matrix");
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (i != j && d(i, j) != 0.0) throw DomainError("diag_bound_rhs: matrix is not diagonal");
      if (i == j && d(i, i) < 0.0) throw DomainError("diag_bound_rhs: negative diagonal entry");
    }
  const auto m = static_cast<unsigned>(d.rows() / 2);
  double s = 0.0;
  for (unsigned k = 0; k <= m; ++k) s += sigma_weight_value(m, k) * elem_sym(d, 2 * k);
  return s;
}

WeightedSigmas weighted_sigmas(const ShapeArray& a) {
  const auto n = static_cast<unsigned>(a.n());
  const SmallMatrix block = a.tangent_block();
  WeightedSigmas w{0.0, 0.0};
  for (unsigned k = 0; k <= n; ++k) {
    const double c = sigma_weight_value(n, k);
    w.tangent += c * elem_sym(block, 2 * k);
    w.perp += c * sigma_perp(a, 2 * k, 2 * n);
  }
  return w;
}

double pointwise_rhs_abs(const ShapeArray& a) {
  const auto n = static_cast<unsigned>(a.n());
  const SmallMatrix block = a.tangent_block();
  double s = 0.0;
  for (unsigned k = 0; k <= n; ++k)
    s += sigma_weight_value(n, k) *
         (std::abs(elem_sym(block, 2 * k)) + std::abs(sigma_perp(a, 2 * k, 2 * n)));
  return s;
}

double pointwise_rhs_angle(const ShapeArray& a) {
  const auto w = weighted_sigmas(a);
  return std::hypot(w.tangent, w.perp);
}

std::string to_string(const SmallMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace puncvol::matrixkit
