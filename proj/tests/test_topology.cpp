#include <doctest.h>

#include <cmath>

#include "puncvol/errors.hpp"
#include "puncvol/rng.hpp"
#include "puncvol/topology.hpp"

using namespace puncvol;
using namespace puncvol::topology;
using fields::VectorField;
using fields::VectorFieldSpec;
using fields::default_pole;

namespace {

// positively oriented orthonormal basis of p^perp, rotated at random
std::vector<Vec> random_chart(CounterRng& rng, const SpherePoint& p) {
  auto base = sphere::pole_basis(p);
  const std::size_t m = base.size();
  std::vector<Vec> out;
  std::vector<Vec> done{p.vec()};
  for (std::size_t i = 0; i < m; ++i) {
    Vec w(p.ambient_dim(), 0.0);
    for (const auto& b : base) axpy(rng.normal_pair().first, b, w);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : done) axpy(-dot(u, w), u, w);
    w = scaled(w, 1.0 / norm(w));
    done.push_back(w);
    out.push_back(w);
  }
  std::vector<Vec> cols{p.vec()};
  cols.insert(cols.end(), out.begin(), out.end());
  if (sphere::column_determinant(cols) < 0) out[0] = scaled(out[0], -1.0);
  return out;
}

}  // namespace

TEST_CASE("degree suite") {
  const auto spec = default_degree_grid(2);
  const double id = kronecker_degree(identity_map(2), spec);
  const double anti = kronecker_degree(antipodal_map(2), spec);
  const double sq = kronecker_degree(suspension_power_map(2), spec);
  CHECK(std::abs(id - 1) <= 1e-3);
  CHECK(std::abs(anti + 1) <= 1e-3);
  CHECK(std::abs(sq - 2) <= 1e-3);
  CHECK(std::abs(kronecker_degree(suspension_power_map(3), spec) - 3) <= 1e-3);
  // antipodal degree (-1)^{m+1}
  CHECK(std::abs(kronecker_degree(antipodal_map(3), default_degree_grid(3)) - 1) <= 1e-3);
  CHECK(std::abs(kronecker_degree(antipodal_map(4), default_degree_grid(4)) + 1) <= 1e-3);
}

TEST_CASE("field index examples and Poincare-Hopf") {
  for (int n = 1; n <= 2; ++n) {
    const auto grid = default_degree_grid(2 * n);
    const SpherePoint q(default_pole(n));
    const SpherePoint mq = SpherePoint::normalized(scaled(q.coords(), -1.0));
    const VectorField radial(VectorFieldSpec::radial(n, q.vec()));
    const auto north = field_index(radial, q, 0.1, grid);
    const auto south = field_index(radial, mq, 0.1, grid);
    CHECK(north.index == 1);
    CHECK(south.index == -1);
    CHECK(north.residual <= kIndexResidualTolerance);
    CHECK(south.residual <= kIndexResidualTolerance);
    for (int d = 1; d <= 3; ++d) {
      const VectorField power(VectorFieldSpec::power(n, d, q.vec()));
      const auto a = field_index(power, q, 0.1, grid);
      const auto b = field_index(power, mq, 0.1, grid);
      CHECK(a.index == d);
      CHECK(a.index + b.index == 0);
      CHECK(a.residual <= kIndexResidualTolerance);
      CHECK(b.residual <= kIndexResidualTolerance);
    }
  }
}

TEST_CASE("chart and radius independence") {
  CounterRng rng(31, 0);
  const auto grid = default_degree_grid(2);
  const SpherePoint p = SpherePoint::normalized(Vec{0.3, -0.2, 0.5, 0.8});
  for (const auto& spec : {VectorFieldSpec::radial(1, p.vec()), VectorFieldSpec::power(1, 2, p.vec())}) {
    const VectorField f(spec);
    const int ref = field_index(f, p, 0.1, grid).index;
    for (int trial = 0; trial < 3; ++trial)
      CHECK(field_index(f, p, 0.1, grid, random_chart(rng, p)).index == ref);
    for (double r : {0.05, 0.1, 0.2}) CHECK(field_index(f, p, r, grid).index == ref);
  }
}

TEST_CASE("field index configuration errors") {
  const VectorField f(VectorFieldSpec::radial(1, default_pole(1)));
  const SpherePoint q(default_pole(1));
  CHECK_THROWS_AS(field_index(f, q, 0.0, default_degree_grid(2)), ConfigError);
  CHECK_THROWS_AS(field_index(f, q, 1.7, default_degree_grid(2)), ConfigError);
  // a regular point 0.3 from the singularity
  const SpherePoint a(Vec{0, 0, std::sin(0.3), std::cos(0.3)});
  CHECK_THROWS_AS(field_index(f, a, 0.2, default_degree_grid(2)), ConfigError);
  CHECK(field_index(f, a, 0.1, default_degree_grid(2)).index == 0);
}

TEST_CASE("index report JSON") {
  const VectorField f(VectorFieldSpec::radial(1, default_pole(1)));
  const auto rep = field_index(f, SpherePoint(default_pole(1)), 0.1, default_degree_grid(2));
  const auto j = rep.to_json();
  CHECK(j["index"] == 1);
  CHECK(j["radius"] == 0.1);
  CHECK(j["grid"]["kind"] == "product");
}
