#include <doctest.h>

#include <cmath>
#include <numbers>

#include "puncvol/errors.hpp"
#include "puncvol/matrixkit.hpp"
#include "puncvol/prober.hpp"
#include "puncvol/rational.hpp"
#include "puncvol/rng.hpp"

using namespace puncvol;
using namespace puncvol::matrixkit;

namespace {

const SmallMatrix kCounter{{1, 0, 0}, {0, 1, 1}, {0, 0, 0}};

SmallMatrix random_matrix(CounterRng& rng, std::size_t r, std::size_t c, double lo, double hi) {
  SmallMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

ShapeArray random_shape(CounterRng& rng, int n) {
  auto m = random_matrix(rng, 2 * n + 1, 2 * n + 1, -1.5, 1.5);
  for (int j = 0; j <= 2 * n; ++j) m(2 * n, j) = 0.0;
  return ShapeArray(n, m);
}

}  // namespace

TEST_CASE("elem_sym examples") {
  CHECK(elem_sym(SmallMatrix::identity(3), 2) == doctest::Approx(3.0));
  const double d[] = {1, 2, 3};
  CHECK(elem_sym(SmallMatrix::diagonal(d), 2) == doctest::Approx(11.0));
  CHECK(elem_sym(kCounter, 0) == 1.0);
  CHECK(elem_sym(SmallMatrix{{1, 2}, {3, 4}}, 2) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(elem_sym(SmallMatrix(2, 3), 1), DomainError);
}

TEST_CASE("elem_sym of identity is binomial") {
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t k = 0; k <= m; ++k)
      CHECK(elem_sym(SmallMatrix::identity(m), k) == doctest::Approx(binomial(m, k).convert_to<double>()));
}

TEST_CASE("elem_sym matches characteristic polynomial coefficients") {
  // det(tI + M) = sum_k e_k t^{m-k}; probe at t = 1
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_matrix(rng, 4, 4, -1, 1);
    double sum = 0;
    for (std::size_t k = 0; k <= 4; ++k) sum += elem_sym(m, k);
    auto shifted = m;
    for (std::size_t i = 0; i < 4; ++i) shifted(i, i) += 1.0;
    CHECK(sum == doctest::Approx(determinant(shifted)).epsilon(1e-12));
  }
}

TEST_CASE("substituted and sigma_perp examples") {
  const ShapeArray a(1, kCounter);
  CHECK(substituted(a, 2) == SmallMatrix{{1, 0}, {0, 1}});
  CHECK(substituted(a, 1) == SmallMatrix{{0, 0}, {1, 1}});
  CHECK(sigma_perp(a, 2, 2) == doctest::Approx(1.0));
  CHECK(sigma_perp(a, 2, 1) == doctest::Approx(0.0));
  CHECK(sigma_perp(a, 0, 1) == 0.0);
  const ShapeArray no_acc(1, SmallMatrix{{1, 2, 0}, {3, 4, 0}, {0, 0, 0}});
  CHECK(substituted(no_acc, 1) == SmallMatrix{{0, 2}, {0, 4}});
}

TEST_CASE("ShapeArray validation") {
  CHECK_THROWS_AS(ShapeArray(1, SmallMatrix{{1, 0, 0}, {0, 1, 0}, {0, 1, 0}}), NumericError);
  CHECK_THROWS_AS(ShapeArray(1, SmallMatrix(2, 2)), DomainError);
  const ShapeArray a(1, kCounter);
  CHECK(a.acceleration() == std::vector<double>{0, 1});
  CHECK(a.last_row_norm() == 0.0);
}

TEST_CASE("graph_volume examples") {
  CHECK(graph_volume(SmallMatrix(3, 3)) == 1.0);
  CHECK(graph_volume(SmallMatrix{{2, 0}, {0, 3}}) == doctest::Approx(std::sqrt(5.0 * 10.0)));
  CHECK(graph_volume(kCounter) == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("Cauchy-Binet: graph_volume equals sqrt det(I + M^T M)") {
  CounterRng rng(2024, 1);
  double worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t m = 2 + trial % 5;
    const auto a = random_matrix(rng, m, m, -2, 2);
    const double g = graph_volume(a);
    worst = std::max(worst, std::abs(g - graph_volume_det(a)) / g);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("diagonal bound examples") {
  for (std::size_t m : {1u, 2u, 3u}) {
    CHECK(diag_bound_rhs(SmallMatrix(2 * m, 2 * m)) == doctest::Approx(1.0));
    CHECK(diag_bound_rhs(SmallMatrix::identity(2 * m)) == doctest::Approx(std::pow(2.0, m)));
    CHECK(graph_volume(SmallMatrix::identity(2 * m)) == doctest::Approx(std::pow(2.0, m)));
  }
  SmallMatrix d(4, 4);
  d(0, 0) = 3.0;
  CHECK(diag_bound_rhs(d) == doctest::Approx(1.0));
  CHECK(graph_volume(d) == doctest::Approx(std::sqrt(10.0)));
  CHECK_THROWS_AS(diag_bound_rhs(SmallMatrix::identity(3)), DomainError);
}

TEST_CASE("diagonal bound holds on random nonnegative diagonals") {
  CounterRng rng(99, 2);
  int failures = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const std::size_t size = 2 * (1 + trial % 4);
    std::vector<double> d(size);
    for (auto& x : d) x = rng.uniform(0.0, 3.0);
    const auto dm = SmallMatrix::diagonal(d);
    if (graph_volume_det(dm) < diag_bound_rhs(dm) - 1e-12) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("diagonal bound equality at 0 and I, exactly") {
  // rationals: sum_k C(m,k)/C(2m,2k) * C(2m,2k) = 2^m at I and 1 at 0
  for (unsigned m = 1; m <= 4; ++m) {
    Rational at_i = 0;
    for (unsigned k = 0; k <= m; ++k) at_i += sigma_weight(m, k) * Rational(binomial(2 * m, 2 * k));
    CHECK(at_i == Rational(BigInt(1) << m));
    CHECK(sigma_weight(m, 0) == Rational(1));
  }
}

TEST_CASE("pointwise forms examples") {
  const ShapeArray zero(1, SmallMatrix(3, 3));
  CHECK(pointwise_rhs_abs(zero) == doctest::Approx(1.0));
  CHECK(pointwise_rhs_angle(zero) == doctest::Approx(1.0));
  const ShapeArray c(1, kCounter);
  CHECK(pointwise_rhs_abs(c) == doctest::Approx(3.0));
  CHECK(pointwise_rhs_angle(c) == doctest::Approx(std::sqrt(5.0)));
  const ShapeArray diag(1, SmallMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  CHECK(pointwise_rhs_abs(diag) == doctest::Approx(2.0));
  CHECK(graph_volume(diag.matrix()) == doctest::Approx(2.0));
  for (double t : {0.3, 1.0, 2.5}) {
    const ShapeArray tt(1, SmallMatrix{{t, 0, 0}, {0, t, 0}, {0, 0, 0}});
    CHECK(pointwise_rhs_angle(tt) == doctest::Approx(1 + t * t));
    CHECK(graph_volume(tt.matrix()) == doctest::Approx(1 + t * t));
  }
}

TEST_CASE("sigma_perp is linear in the acceleration column") {
  CounterRng rng(5, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const auto a = random_shape(rng, n);
    const double t = rng.uniform(-3, 3);
    auto scaled = a.matrix();
    for (int i = 0; i < 2 * n; ++i) scaled(i, 2 * n) *= t;
    const ShapeArray b(n, scaled);
    for (std::size_t k = 2; k <= static_cast<std::size_t>(2 * n); k += 2)
      for (std::size_t l = 1; l <= static_cast<std::size_t>(2 * n); ++l)
        CHECK(sigma_perp(b, k, l) == doctest::Approx(t * sigma_perp(a, k, l)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("common-angle form is below graph volume on random arrays") {
  CounterRng rng(17, 4);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + trial % 3;
    const auto a = random_shape(rng, n);
    CHECK(pointwise_rhs_angle(a) <= graph_volume_det(a.matrix()) * (1 + 1e-12));
  }
}

TEST_CASE("prober records reproduce bit-for-bit") {
  const auto rep = probe_lemma(1, 20000, 7);
  REQUIRE(rep.abs_violations > 0);
  CHECK(rep.angle_violations == 0);
  for (const auto& e : rep.abs_examples) {
    CHECK(e.a == probe_matrix(1, 7, e.trial));
    const ShapeArray a(1, e.a);
    CHECK(graph_volume(e.a) == e.lhs);
    CHECK(pointwise_rhs_abs(a) == e.rhs);
    CHECK(e.rhs > e.lhs);
  }
  const auto again = probe_lemma(1, 20000, 7);
  CHECK(again.abs_violations == rep.abs_violations);
  CHECK(again.abs_examples == rep.abs_examples);
  const auto j = rep.to_json();
  CHECK(j["regression_case"]["abs_violation"] == true);
  CHECK(j["regression_case"]["angle_violation"] == false);
}
