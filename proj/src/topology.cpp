#include "puncvol/topology.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "puncvol/errors.hpp"
#include "puncvol/matrixkit.hpp"
#include "puncvol/parallel.hpp"

namespace puncvol::topology {

SphereMap identity_map(int m) {
  return {m, [](std::span<const double> x) { return Vec(x.begin(), x.end()); }, 1e-5};
}

SphereMap antipodal_map(int m) {
  return {m, [](std::span<const double> x) { return scaled(x, -1.0); }, 1e-5};
}

SphereMap suspension_power_map(int d) {
  if (d < 1) throw DomainError("suspension_power_map: d must be >= 1");
  return {2,
          [d](std::span<const double> x) {
            std::complex<double> z(x[0], x[1]), zd(1.0, 0.0);
            for (int i = 0; i < d; ++i) zd *= z;
            Vec y{zd.real(), zd.imag(), x[2]};
            const double r = norm(y);
            for (double& t : y) t /= r;
            return y;
          },
          1e-5};
}

GridSpec default_degree_grid(int m) {
  if (m == 2) return GridSpec::product({48, 96});
  std::vector<int> axes(static_cast<std::size_t>(m), 16);
  axes.back() = 32;
  return GridSpec::product(axes);
}

double kronecker_degree(const SphereMap& f, const GridSpec& spec) {
  if (!f.eval) throw DomainError("kronecker_degree: empty map");
  const auto grid = sphere::quad_sphere(f.m, spec);
  const std::size_t dim = grid.ambient_dim();
  const double h = f.h, ch = std::cos(h), sh = std::sin(h);
  const auto total = parallel_sum<1>(grid.size(), [&](std::size_t i) {
    Vec x(dim);
    const double w = grid.node(i, x);
    const auto basis = sphere::tangent_basis(x);
    std::vector<Vec> cols;
    cols.reserve(dim);
    Vec fx = f.eval(x);
    if (fx.size() != dim || std::abs(norm(fx) - 1.0) > 1e-10)
      throw NumericError("kronecker_degree: map output is not a unit vector");
    cols.push_back(std::move(fx));
    Vec xp(dim), xm(dim);
    for (const auto& b : basis) {
      for (std::size_t k = 0; k < dim; ++k) {
        xp[k] = ch * x[k] + sh * b[k];
        xm[k] = ch * x[k] - sh * b[k];
      }
      const Vec fp = f.eval(xp), fm = f.eval(xm);
      Vec df(dim);
      for (std::size_t k = 0; k < dim; ++k) df[k] = (fp[k] - fm[k]) / (2.0 * h);
      cols.push_back(std::move(df));
    }
    const double det = sphere::column_determinant(cols);
    if (!std::isfinite(det)) throw NumericError("kronecker_degree: derivative failure");
    return std::array<double, 1>{w * det};
  });
  return total[0] / sphere::sphere_volume(f.m);
}

nlohmann::json IndexReport::to_json() const {
  return {{"point", point}, {"radius", radius},     {"raw_degree", raw_degree},
          {"index", index}, {"residual", residual}, {"grid", grid}};
}

IndexReport field_index(const fields::VectorField& f, const SpherePoint& p, double radius,
                        const GridSpec& spec, const std::optional<std::vector<Vec>>& chart) {
  if (p.ambient_dim() != f.ambient_dim()) throw DomainError("field_index: point dimension mismatch");
  if (!(radius > 0.0 && radius < std::numbers::pi / 2))
    throw ConfigError("field_index: radius must lie in (0, pi/2)");
  for (const auto& s : f.singular_points()) {
    const double d = sphere::geodesic_distance(p.coords(), s.coords());
    if (d > 1e-12 && d < 2.0 * radius)
      throw ConfigError("field_index: radius too large, another singular point lies within twice the radius");
  }
  const std::size_t dim = p.ambient_dim();
  std::vector<Vec> basis = chart ? *chart : sphere::pole_basis(p);
  if (basis.size() != dim - 1) throw DomainError("field_index: chart basis must have 2n+1 vectors");
  for (std::size_t a = 0; a < basis.size(); ++a) {
    if (basis[a].size() != dim || std::abs(dot(basis[a], p.coords())) > 1e-10)
      throw DomainError("field_index: chart basis must be tangent at p");
    for (std::size_t b = 0; b <= a; ++b)
      if (std::abs(dot(basis[a], basis[b]) - (a == b ? 1.0 : 0.0)) > 1e-10)
        throw DomainError("field_index: chart basis must be orthonormal");
  }

  const double cr = std::cos(radius), sr = std::sin(radius), stretch = radius / sr;
  SphereMap map;
  map.m = static_cast<int>(dim) - 2;
  map.eval = [&, cr, sr, stretch](std::span<const double> y) {
    // x = exp_p(radius y); gamma' is the unit radial direction at x
    Vec by(dim, 0.0);
    for (std::size_t a = 0; a < basis.size(); ++a) axpy(y[a], basis[a], by);
    Vec x(dim), g(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = cr * p[k] + sr * by[k];
      g[k] = -sr * p[k] + cr * by[k];
    }
    const double xn = norm(x);
    for (double& t : x) t /= xn;
    Vec v = f.eval(x);
    const double c_r = dot(v, g);
    axpy(-c_r, g, v);
    Vec c(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) c[a] = stretch * dot(basis[a], v);
    axpy(-dot(c, y), y, c);
    axpy(c_r, y, c);
    const double cn = norm(c);
    if (!(cn > 0.0)) throw NumericError("field_index: field vanishes on the small sphere");
    for (double& t : c) t /= cn;
    return c;
  };

  IndexReport r;
  r.point = p.vec();
  r.radius = radius;
  r.raw_degree = kronecker_degree(map, spec);
  r.index = static_cast<int>(std::lround(r.raw_degree));
  r.residual = std::abs(r.raw_degree - r.index);
  r.grid = sphere::quad_sphere(map.m, spec).descriptor();
  return r;
}

}  // namespace puncvol::topology
