#include "puncvol/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "puncvol/errors.hpp"
#include "puncvol/matrixkit.hpp"
#include "puncvol/parallel.hpp"
#include "puncvol/rational.hpp"

namespace puncvol::functionals {

using matrixkit::SmallMatrix;

double volume_integrand(const VectorField& f, std::span<const double> x) {
  const SmallMatrix jac = f.jacobian(x);
  const std::vector<Vec> b = sphere::tangent_basis(x);
  const std::size_t m = b.size(), dim = x.size();
  SmallMatrix a(m, m);
  Vec col(dim);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += jac(i, k) * b[j][k];
      col[i] = s;
    }
    for (std::size_t i = 0; i < m; ++i) a(i, j) = dot(b[i], col);
  }
  return matrixkit::graph_volume_det(a);
}

nlohmann::json VolumeEstimate::to_json() const {
  return {{"value", value},      {"error", error}, {"error_kind", error_kind},
          {"normalized", normalized}, {"nodes", nodes}, {"grid", grid},
          {"field", field},      {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)}};
}

VolumeEstimate VolumeEstimate::from_json(const nlohmann::json& j) {
  VolumeEstimate v;
  v.value = j.at("value").get<double>();
  v.error = j.at("error").get<double>();
  v.error_kind = j.at("error_kind").get<std::string>();
  v.normalized = j.at("normalized").get<double>();
  v.nodes = j.at("nodes").get<std::size_t>();
  v.grid = j.at("grid");
  v.field = j.at("field");
  if (!j.at("seed").is_null()) v.seed = j.at("seed").get<std::uint64_t>();
  return v;
}

GridSpec default_volume_grid(const VectorField& f) {
  const int n = f.n();
  if (!f.has_singularities()) {
    if (n == 1) return GridSpec::product({64, 64, 64});
    std::vector<int> axes(static_cast<std::size_t>(2 * n + 1), 24);
    axes.back() = 48;
    return GridSpec::product(axes);
  }
  if (n == 1) return GridSpec::sliced(40, {32, 64});
  std::vector<int> axes(static_cast<std::size_t>(2 * n), n == 2 ? 24 : 12);
  axes.back() = 2 * axes.front();
  return GridSpec::sliced(n == 2 ? 40 : 20, axes);
}

namespace {

std::array<double, 2> grid_sums(const VectorField& f, const sphere::QuadratureGrid& g) {
  const std::size_t dim = g.ambient_dim();
  return parallel_sum<2>(g.size(), [&](std::size_t i) {
    Vec x(dim);
    const double w = g.node(i, x);
    const double v = volume_integrand(f, x);
    return std::array<double, 2>{w * v, w * v * v};
  });
}

}  // namespace

namespace {

void check_volume_grid(const VectorField& f, const GridSpec& spec) {
  if (!f.has_singularities()) return;
  if (spec.kind == sphere::GridKind::monte_carlo)
    throw ConfigError("monte-carlo refused: the volume integrand of a singular field has unbounded "
                      "second moment; use a sliced grid around a singular point");
  if (spec.kind != sphere::GridKind::sliced)
    throw ConfigError("singular fields require a sliced grid around a singular point");
}

std::optional<SpherePoint> volume_pole(const VectorField& f, const GridSpec& spec) {
  if (spec.kind != sphere::GridKind::sliced) return std::nullopt;
  return f.has_singularities() ? f.singular_points().front() : SpherePoint(fields::default_pole(f.n()));
}

}  // namespace

double integrate_volume(const VectorField& f, const GridSpec& spec) {
  check_volume_grid(f, spec);
  return grid_sums(f, sphere::make_grid(2 * f.n() + 1, spec, volume_pole(f, spec)))[0];
}

VolumeEstimate volume(const VectorField& f, const GridSpec& spec) {
  const int m = 2 * f.n() + 1;
  check_volume_grid(f, spec);
  const auto pole = volume_pole(f, spec);
  const auto grid = sphere::make_grid(m, spec, pole);

  VolumeEstimate est;
  const auto sums = grid_sums(f, grid);
  est.value = sums[0];
  est.nodes = grid.size();
  est.grid = grid.descriptor();
  est.field = f.spec().to_json();
  est.seed = grid.seed();
  if (spec.kind == sphere::GridKind::monte_carlo) {
    const double vol = sphere::sphere_volume(m);
    const double mean = sums[0] / vol, second = sums[1] / vol;
    const auto count = static_cast<double>(grid.size());
    est.error = count > 1 ? vol * std::sqrt(std::max(0.0, second - mean * mean) / (count - 1.0)) : 0.0;
    est.error_kind = "stderr";
  } else {
    const auto coarse = sphere::make_grid(m, spec.halved(), pole);
    est.error = std::abs(sums[0] - grid_sums(f, coarse)[0]);
    est.error_kind = "refinement";
  }
  est.normalized = est.value / sphere::sphere_volume(m);
  return est;
}

namespace {

std::vector<Vec> frame_with_v(std::span<const double> x, const Vec& v) {
  std::vector<Vec> e = sphere::orthonormal_completion({Vec(x.begin(), x.end()), v}, x.size(), x.size() - 2);
  e.push_back(v);
  return e;
}

}  // namespace

double bcn_density(const VectorField& f, std::span<const double> x) {
  const Vec v = f.eval(x);
  const auto a = fields::shape_matrix(f, x, frame_with_v(x, v));
  const SmallMatrix block = a.tangent_block();
  const auto n = static_cast<unsigned>(f.n());
  double s = 0.0;
  for (unsigned k = 0; k <= n; ++k) s += sigma_weight_value(n, k) * std::abs(matrixkit::elem_sym(block, 2 * k));
  return s;
}

double flux_density(const VectorField& f, const SpherePoint& x, const SpherePoint& pole) {
  const Vec v = f.eval(x.coords());
  const auto frame = sphere::adapted_frame(x, pole, v);
  const auto a = fields::shape_matrix(f, x, frame);
  const auto w = matrixkit::weighted_sigmas(a);
  // orientation of (e_1..e_{2n-1}, u) relative to the boundary of the ball
  const double sign = frame.sphere_orientation * frame.parallel_orientation;
  const double tau = 2.0 / sphere::sphere_volume(2 * f.n());
  return tau * sign * (std::sin(frame.alpha) * w.tangent + std::cos(frame.alpha) * w.perp);
}

GridSpec default_parallel_grid(int n) {
  if (n == 1) return GridSpec::parallel({48, 96});
  std::vector<int> axes(static_cast<std::size_t>(2 * n), 16);
  axes.back() = 32;
  return GridSpec::parallel(axes);
}

double parallel_flux(const VectorField& f, const SpherePoint& pole, double theta, const GridSpec& spec) {
  if (pole.ambient_dim() != f.ambient_dim()) throw DomainError("parallel_flux: pole dimension mismatch");
  const auto grid = sphere::quad_parallel(pole, theta, spec);
  const std::size_t dim = grid.ambient_dim();
  return parallel_sum<1>(grid.size(), [&](std::size_t i) {
    Vec x(dim);
    const double w = grid.node(i, x);
    return std::array<double, 1>{w * flux_density(f, SpherePoint::normalized(std::move(x)), pole)};
  })[0];
}

double extrapolate_r2(std::span<const double> r, std::span<const double> values) {
  if (r.size() != values.size() || r.size() < 2) throw DomainError("extrapolate_r2: need >= 2 samples");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = r[i] * r[i];
    n += 1;
    sx += x;
    sy += values[i];
    sxx += x * x;
    sxy += x * values[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - b * sx) / n;
}

namespace {

PoleLimit pole_limit(const VectorField& f, const SpherePoint& pole, const GridSpec& spec, bool north) {
  PoleLimit p;
  for (double r : kPoleColatitudes) {
    const double theta = north ? std::numbers::pi / 2 - r : r - std::numbers::pi / 2;
    p.colatitudes.push_back(r);
    p.fluxes.push_back(parallel_flux(f, pole, theta, spec));
  }
  p.limit = extrapolate_r2(p.colatitudes, p.fluxes);
  p.limit_reversed = -p.limit;
  // the small sphere around the antipode is oriented by its own ball
  p.index_estimate = 0.5 * (north ? p.limit : p.limit_reversed);
  return p;
}

nlohmann::json limit_json(const PoleLimit& p) {
  return {{"colatitudes", p.colatitudes},
          {"fluxes", p.fluxes},
          {"limit", p.limit},
          {"limit_reversed", p.limit_reversed},
          {"index_estimate", p.index_estimate}};
}

}  // namespace

FluxScan stokes_scan(const VectorField& f, const SpherePoint& pole, const std::vector<double>& thetas,
                     const GridSpec& spec) {
  if (thetas.size() < 2) throw DomainError("stokes_scan: need at least two thetas");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(std::abs(thetas[i]) < std::numbers::pi / 2)) throw DomainError("stokes_scan: |theta| must be < pi/2");
    if (i > 0 && !(thetas[i] > thetas[i - 1])) throw DomainError("stokes_scan: thetas must be strictly increasing");
  }
  FluxScan s;
  s.pole = pole.vec();
  s.thetas = thetas;
  for (double t : thetas) s.fluxes.push_back(parallel_flux(f, pole, t, spec));
  const auto [lo, hi] = std::minmax_element(s.fluxes.begin(), s.fluxes.end());
  s.deviation = *hi - *lo;
  s.north = pole_limit(f, pole, spec, true);
  s.south = pole_limit(f, pole, spec, false);
  s.grid = spec.to_json();
  return s;
}

nlohmann::json FluxScan::to_json() const {
  return {{"pole", pole},
          {"thetas", thetas},
          {"fluxes", fluxes},
          {"deviation", deviation},
          {"north", limit_json(north)},
          {"south", limit_json(south)},
          {"grid", grid}};
}

}  // namespace puncvol::functionals
