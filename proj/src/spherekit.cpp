#include "puncvol/spherekit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "puncvol/errors.hpp"
#include "puncvol/matrixkit.hpp"
#include "puncvol/parallel.hpp"
#include "puncvol/rng.hpp"

namespace puncvol::sphere {

SpherePoint::SpherePoint(Vec x) : x_(std::move(x)) {
  if (x_.size() < 2) throw DomainError("SpherePoint: ambient dimension must be >= 2");
  if (std::abs(norm(x_) - 1.0) > 1e-12) throw DomainError("SpherePoint: coordinates are not unit length");
}

SpherePoint SpherePoint::normalized(Vec x) {
  const double r = norm(x);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("SpherePoint: cannot normalize zero vector");
  for (double& v : x) v /= r;
  return SpherePoint(std::move(x), Trusted{});
}

double sphere_volume(int m) {
  if (m < 1) throw DomainError("sphere_volume: dimension must be >= 1");
  const double h = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

Vec tangent_project(std::span<const double> x, std::span<const double> w) {
  Vec r(w.begin(), w.end());
  axpy(-dot(w, x), x, r);
  return r;
}

double geodesic_distance(std::span<const double> x, std::span<const double> y) {
  // atan2 form stays accurate near 0 and pi
  double d2 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d2 += (x[i] - y[i]) * (x[i] - y[i]);
    s2 += (x[i] + y[i]) * (x[i] + y[i]);
  }
  return 2.0 * std::atan2(std::sqrt(d2), std::sqrt(s2));
}

double column_determinant(const std::vector<Vec>& columns) {
  const std::size_t n = columns.size();
  matrixkit::SmallMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (columns[j].size() != n) throw DomainError("column_determinant: not a square system");
    for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
  }
  return matrixkit::determinant(m);
}

namespace {

void orthogonalize(Vec& r, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) axpy(-dot(r, b), b, r);
}

}  // namespace

std::vector<Vec> orthonormal_completion(const std::vector<Vec>& against, std::size_t dim,
                                        std::size_t count) {
  std::vector<Vec> current = against;
  std::vector<Vec> out;
  std::vector<bool> used(dim, false);
  for (std::size_t step = 0; step < count; ++step) {
    double best = -1.0;
    std::size_t best_i = 0;
    Vec best_r;
    for (std::size_t i = 0; i < dim; ++i) {
      if (used[i]) continue;
      Vec r = unit_vector(dim, i);
      orthogonalize(r, current);
      const double len = norm(r);
      if (len > best) {
        best = len;
        best_i = i;
        best_r = std::move(r);
      }
    }
    if (best < 1e-8) throw NumericError("orthonormal_completion: span is already full");
    used[best_i] = true;
    for (double& v : best_r) v /= best;
    current.push_back(best_r);
    out.push_back(std::move(best_r));
  }
  return out;
}

std::vector<Vec> tangent_basis(std::span<const double> x) {
  // Householder reflection sending x to -s e_k; its other columns span x^perp.
  const std::size_t n = x.size();
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[k])) k = i;
  const double s = x[k] >= 0.0 ? 1.0 : -1.0;
  Vec u(x.begin(), x.end());
  u[k] += s;
  const double uu = dot(u, u);
  std::vector<Vec> basis;
  basis.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == k) continue;
    Vec col(n);
    const double f = 2.0 * u[j] / uu;
    for (std::size_t i = 0; i < n; ++i) col[i] = (i == j ? 1.0 : 0.0) - f * u[i];
    basis.push_back(std::move(col));
  }
  // det[x, H e_j (j != k)] = s (-1)^k
  if (s * ((k % 2 == 0) ? 1.0 : -1.0) < 0.0)
    for (double& v : basis[0]) v = -v;
  return basis;
}

std::vector<Vec> pole_basis(const SpherePoint& p) {
  const std::size_t dim = p.ambient_dim();
  std::vector<Vec> current{p.vec()};
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < dim && basis.size() + 1 < dim; ++i) {
    Vec r = unit_vector(dim, i);
    orthogonalize(r, current);
    const double len = norm(r);
    if (len < 1e-3) continue;
    for (double& v : r) v /= len;
    current.push_back(r);
    basis.push_back(std::move(r));
  }
  if (basis.size() + 1 != dim) throw NumericError("pole_basis: Gram-Schmidt failed");
  std::vector<Vec> cols{p.vec()};
  cols.insert(cols.end(), basis.begin(), basis.end());
  if (column_determinant(cols) < 0.0)
    for (double& v : basis.back()) v = -v;
  return basis;
}

ParallelFrame parallel_frame(const SpherePoint& x, const SpherePoint& pole) {
  if (x.ambient_dim() != pole.ambient_dim()) throw DomainError("parallel_frame: dimension mismatch");
  Vec nrm = tangent_project(x.coords(), pole.coords());
  const double len = norm(nrm);
  if (len < 1e-12) throw DegeneratePointError("parallel_frame: point coincides with +-pole");
  for (double& v : nrm) v /= len;
  const std::size_t dim = x.ambient_dim();
  ParallelFrame f;
  f.basis = orthonormal_completion({x.vec(), nrm}, dim, dim - 2);
  std::vector<Vec> cols{x.vec(), scaled(nrm, -1.0)};
  cols.insert(cols.end(), f.basis.begin(), f.basis.end());
  if (column_determinant(cols) < 0.0)
    for (double& v : f.basis[0]) v = -v;
  f.basis.push_back(nrm);
  f.normal = std::move(nrm);
  return f;
}

AdaptedFrame adapted_frame(const SpherePoint& x, const SpherePoint& pole, std::span<const double> v) {
  const std::size_t dim = x.ambient_dim();
  if (v.size() != dim) throw DomainError("adapted_frame: dimension mismatch");
  if (std::abs(norm(v) - 1.0) > 1e-9) throw DomainError("adapted_frame: v is not a unit vector");
  if (std::abs(dot(v, x.coords())) > 1e-9) throw DomainError("adapted_frame: v is not tangent at x");

  AdaptedFrame f;
  Vec nrm = tangent_project(x.coords(), pole.coords());
  const double len = norm(nrm);
  if (len < 1e-12) throw DegeneratePointError("adapted_frame: point coincides with +-pole");
  for (double& c : nrm) c /= len;

  const double s = dot(v, nrm);
  Vec w(v.begin(), v.end());
  axpy(-s, nrm, w);
  const double c = norm(w);
  f.alpha = std::atan2(s, c);
  f.degenerate = c <= 1e-9;

  Vec vv(v.begin(), v.end());
  if (!f.degenerate) {
    for (double& t : w) t /= c;
    f.e = orthonormal_completion({x.vec(), nrm, w}, dim, dim - 3);
    // e_2n = (sin a v - N) / cos a, written without the cancellation
    Vec e2n = scaled(w, s);
    axpy(-c, nrm, e2n);
    f.e.push_back(std::move(e2n));
  } else {
    f.e = orthonormal_completion({x.vec(), nrm}, dim, dim - 2);
  }
  f.e.push_back(vv);

  std::vector<Vec> cols{x.vec()};
  cols.insert(cols.end(), f.e.begin(), f.e.end());
  if (column_determinant(cols) < 0.0)
    for (double& t : f.e[0]) t = -t;
  f.sphere_orientation = 1;

  const double sa = std::sin(f.alpha), ca = std::cos(f.alpha);
  Vec u = scaled(f.e[dim - 3], sa);
  axpy(ca, vv, u);
  std::vector<Vec> pcols{x.vec(), scaled(nrm, -1.0)};
  pcols.insert(pcols.end(), f.e.begin(), f.e.begin() + static_cast<long>(dim - 3));
  pcols.push_back(u);
  f.parallel_orientation = column_determinant(pcols) > 0.0 ? 1 : -1;
  f.normal = std::move(nrm);
  return f;
}

// ---------------------------------------------------------------- 1D rules

Rule1D gauss_gegenbauer(int q, double a) {
  if (q < 1) throw DomainError("gauss_gegenbauer: zero resolution");
  if (a < 0.0) throw DomainError("gauss_gegenbauer: exponent must be >= 0");
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double kk = k, s = 2.0 * kk + 2.0 * a;
    const double b2 = 4.0 * kk * (kk + a) * (kk + a) * (kk + 2.0 * a) / (s * s * (s + 1.0) * (s - 1.0));
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Rule1D r;
  r.nodes.resize(q);
  r.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  // the weight is even: symmetrize so odd moments cancel exactly
  for (int i = 0; i < q / 2; ++i) {
    const int j = q - 1 - i;
    const double t = 0.5 * (r.nodes[j] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -t;
    r.nodes[j] = t;
    r.weights[i] = r.weights[j] = w;
  }
  if (q % 2 == 1) r.nodes[q / 2] = 0.0;
  return r;
}

Rule1D gauss_legendre(int q) { return gauss_gegenbauer(q, 0.0); }

// ---------------------------------------------------------------- grids

std::string to_string(GridKind k) {
  switch (k) {
    case GridKind::product: return "product";
    case GridKind::parallel: return "parallel";
    case GridKind::sliced: return "sliced";
    case GridKind::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

GridSpec GridSpec::product(std::vector<int> axes) {
  GridSpec s;
  s.kind = GridKind::product;
  s.axes = std::move(axes);
  return s;
}

GridSpec GridSpec::parallel(std::vector<int> axes) {
  GridSpec s;
  s.kind = GridKind::parallel;
  s.axes = std::move(axes);
  return s;
}

GridSpec GridSpec::sliced(int slices, std::vector<int> parallel_axes) {
  GridSpec s;
  s.kind = GridKind::sliced;
  s.slices = slices;
  s.axes = std::move(parallel_axes);
  return s;
}

GridSpec GridSpec::monte_carlo(std::size_t count, std::uint64_t seed) {
  GridSpec s;
  s.kind = GridKind::monte_carlo;
  s.count = count;
  s.seed = seed;
  return s;
}

GridSpec GridSpec::halved() const {
  GridSpec h = *this;
  for (int& a : h.axes) a = std::max(1, a / 2);
  h.slices = std::max(1, slices / 2);
  h.count = std::max<std::size_t>(1, count / 2);
  return h;
}

nlohmann::json GridSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case GridKind::product: j["axes"] = axes; break;
    case GridKind::parallel: j["parallel"] = axes; break;
    case GridKind::sliced:
      j["slices"] = slices;
      j["parallel"] = axes;
      break;
    case GridKind::monte_carlo: j["count"] = count; break;
  }
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grid: expected a JSON object");
  GridSpec s;
  const std::string kind = j.value("kind", std::string("product"));
  if (kind == "product") s.kind = GridKind::product;
  else if (kind == "parallel") s.kind = GridKind::parallel;
  else if (kind == "sliced") s.kind = GridKind::sliced;
  else if (kind == "monte-carlo" || kind == "monte_carlo" || kind == "mc") s.kind = GridKind::monte_carlo;
  else throw ConfigError("grid: unknown kind '" + kind + "'");
  try {
    if (j.contains("axes")) s.axes = j.at("axes").get<std::vector<int>>();
    else if (j.contains("parallel")) s.axes = j.at("parallel").get<std::vector<int>>();
    s.slices = j.value("slices", 0);
    s.count = j.value("count", std::size_t{0});
    if (j.contains("seed") && !j.at("seed").is_null()) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  return s;
}

namespace {

void init_core(QuadratureGrid& g, int k, const std::vector<int>& axes,
               std::vector<Rule1D>& polar, std::vector<std::vector<double>>& sines, int& azimuth) {
  (void)g;
  if (static_cast<int>(axes.size()) != k)
    throw DomainError("grid: expected " + std::to_string(k) + " axis resolutions for S^" + std::to_string(k));
  for (int a : axes)
    if (a < 1) throw DomainError("grid: zero resolution");
  polar.clear();
  sines.clear();
  for (int a = 0; a + 1 < k; ++a) {
    const int level = k - a;  // polar angle of S^level
    Rule1D r = gauss_gegenbauer(axes[a], 0.5 * (level - 2));
    std::vector<double> s(r.nodes.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(std::max(0.0, 1.0 - r.nodes[i] * r.nodes[i]));
    polar.push_back(std::move(r));
    sines.push_back(std::move(s));
  }
  azimuth = axes.back();
}

}  // namespace

std::size_t QuadratureGrid::core_size() const {
  std::size_t s = static_cast<std::size_t>(azimuth_);
  for (const auto& r : polar_) s *= r.nodes.size();
  return s;
}

std::size_t QuadratureGrid::size() const {
  if (kind_ == GridKind::monte_carlo) return count_;
  return core_size() * std::max<std::size_t>(1, slice_cos_.size());
}

double QuadratureGrid::core_node(std::size_t j, std::span<double> y) const {
  const int k = core_dim_;
  const std::size_t az = j % static_cast<std::size_t>(azimuth_);
  j /= static_cast<std::size_t>(azimuth_);
  thread_local std::vector<std::size_t> idx;
  idx.assign(polar_.size(), 0);
  for (std::size_t a = polar_.size(); a-- > 0;) {
    idx[a] = j % polar_[a].nodes.size();
    j /= polar_[a].nodes.size();
  }
  double w = 2.0 * std::numbers::pi / azimuth_;
  double rho = 1.0;
  for (std::size_t a = 0; a < polar_.size(); ++a) {
    y[static_cast<std::size_t>(k) - a] = rho * polar_[a].nodes[idx[a]];
    rho *= polar_sine_[a][idx[a]];
    w *= polar_[a].weights[idx[a]];
  }
  const double psi = 2.0 * std::numbers::pi * static_cast<double>(az) / azimuth_;
  y[0] = rho * std::cos(psi);
  y[1] = rho * std::sin(psi);
  return w;
}

double QuadratureGrid::node(std::size_t i, std::span<double> x) const {
  if (i >= size()) throw DomainError("grid: node index out of range");
  if (kind_ == GridKind::monte_carlo) {
    CounterRng rng(seed_, i);
    for (std::size_t c = 0; c < ambient_dim_; c += 2) {
      auto [a, b] = rng.normal_pair();
      x[c] = a;
      if (c + 1 < ambient_dim_) x[c + 1] = b;
    }
    const double r = norm(x);
    for (double& v : x) v /= r;
    return sphere_volume(manifold_dim_) / static_cast<double>(count_);
  }
  if (!pole_) return core_node(i, x);

  const std::size_t cs = core_size();
  const std::size_t slice = i / cs;
  thread_local Vec y;
  y.assign(static_cast<std::size_t>(core_dim_) + 1, 0.0);
  const double w = core_node(i % cs, y);
  const double c = slice_cos_[slice], s = slice_sin_[slice];
  const auto p = pole_->coords();
  for (std::size_t d = 0; d < ambient_dim_; ++d) x[d] = c * p[d];
  for (std::size_t a = 0; a < basis_.size(); ++a) axpy(s * y[a], basis_[a], x);
  return w * slice_factor_[slice];
}

SpherePoint QuadratureGrid::point(std::size_t i) const {
  Vec x(ambient_dim_);
  node(i, x);
  return SpherePoint::normalized(std::move(x));
}

double QuadratureGrid::weight(std::size_t i) const {
  Vec x(ambient_dim_);
  return node(i, x);
}

double QuadratureGrid::total_weight() const {
  return parallel_sum<1>(size(), [&](std::size_t i) { return std::array<double, 1>{weight(i)}; })[0];
}

nlohmann::json QuadratureGrid::descriptor() const {
  nlohmann::json j = spec_.to_json();
  j["nodes"] = size();
  j["manifold_dim"] = manifold_dim_;
  if (pole_) j["pole"] = pole_->vec();
  if (kind_ == GridKind::parallel) j["theta"] = theta_;
  return j;
}

QuadratureGrid quad_sphere(int m, const GridSpec& spec) {
  if (m < 1) throw DomainError("quad_sphere: dimension must be >= 1");
  QuadratureGrid g;
  g.kind_ = GridKind::product;
  g.spec_ = spec;
  g.spec_.kind = GridKind::product;
  g.manifold_dim_ = m;
  g.ambient_dim_ = static_cast<std::size_t>(m) + 1;
  g.core_dim_ = m;
  init_core(g, m, spec.axes, g.polar_, g.polar_sine_, g.azimuth_);
  return g;
}

QuadratureGrid quad_parallel(const SpherePoint& pole, double theta, const GridSpec& spec) {
  if (!(std::abs(theta) < std::numbers::pi / 2)) throw DomainError("quad_parallel: |theta| must be < pi/2");
  const int k = static_cast<int>(pole.ambient_dim()) - 2;
  if (k < 1) throw DomainError("quad_parallel: pole dimension too small");
  QuadratureGrid g;
  g.kind_ = GridKind::parallel;
  g.spec_ = spec;
  g.spec_.kind = GridKind::parallel;
  g.manifold_dim_ = k;
  g.ambient_dim_ = pole.ambient_dim();
  g.core_dim_ = k;
  init_core(g, k, spec.axes, g.polar_, g.polar_sine_, g.azimuth_);
  g.pole_ = pole;
  g.basis_ = pole_basis(pole);
  g.theta_ = theta;
  g.slice_cos_ = {std::sin(theta)};
  g.slice_sin_ = {std::cos(theta)};
  g.slice_factor_ = {std::pow(std::cos(theta), k)};
  return g;
}

QuadratureGrid quad_sliced(const SpherePoint& pole, const GridSpec& spec) {
  if (spec.slices < 1) throw DomainError("quad_sliced: zero resolution");
  const int k = static_cast<int>(pole.ambient_dim()) - 2;
  if (k < 1) throw DomainError("quad_sliced: pole dimension too small");
  QuadratureGrid g;
  g.kind_ = GridKind::sliced;
  g.spec_ = spec;
  g.spec_.kind = GridKind::sliced;
  g.manifold_dim_ = k + 1;
  g.ambient_dim_ = pole.ambient_dim();
  g.core_dim_ = k;
  init_core(g, k, spec.axes, g.polar_, g.polar_sine_, g.azimuth_);
  g.pole_ = pole;
  g.basis_ = pole_basis(pole);
  const Rule1D r = gauss_legendre(spec.slices);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double col = 0.5 * std::numbers::pi * (r.nodes[i] + 1.0);
    g.slice_cos_.push_back(std::cos(col));
    g.slice_sin_.push_back(std::sin(col));
    g.slice_factor_.push_back(0.5 * std::numbers::pi * r.weights[i] * std::pow(std::sin(col), k));
  }
  return g;
}

QuadratureGrid mc_sample(int m, std::size_t count, std::uint64_t seed) {
  if (m < 1) throw DomainError("mc_sample: dimension must be >= 1");
  if (count < 1) throw DomainError("mc_sample: count must be >= 1");
  QuadratureGrid g;
  g.kind_ = GridKind::monte_carlo;
  g.spec_ = GridSpec::monte_carlo(count, seed);
  g.manifold_dim_ = m;
  g.ambient_dim_ = static_cast<std::size_t>(m) + 1;
  g.count_ = count;
  g.seed_ = seed;
  return g;
}

QuadratureGrid make_grid(int m, const GridSpec& spec, const std::optional<SpherePoint>& pole) {
  switch (spec.kind) {
    case GridKind::product: return quad_sphere(m, spec);
    case GridKind::sliced:
      if (!pole) throw ConfigError("sliced grid requires a pole");
      if (static_cast<int>(pole->ambient_dim()) != m + 1) throw ConfigError("sliced grid: pole dimension mismatch");
      return quad_sliced(*pole, spec);
    case GridKind::monte_carlo:
      if (!spec.seed) throw ConfigError("monte-carlo grid requires a seed");
      return mc_sample(m, spec.count, *spec.seed);
    case GridKind::parallel: break;
  }
  throw ConfigError("parallel grids are built per latitude (quad_parallel)");
}

}  // namespace puncvol::sphere
