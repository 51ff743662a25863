#include "puncvol/fields.hpp"

#include <cmath>
#include <limits>

#include "puncvol/errors.hpp"
#include "puncvol/rng.hpp"

namespace puncvol::fields {

using matrixkit::SmallMatrix;

std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::hopf: return "hopf";
    case FieldKind::radial: return "radial";
    case FieldKind::power: return "power";
    case FieldKind::perturbed_hopf: return "perturbed-hopf";
  }
  return "unknown";
}

FieldKind field_kind_from_string(const std::string& s) {
  if (s == "hopf") return FieldKind::hopf;
  if (s == "radial") return FieldKind::radial;
  if (s == "power") return FieldKind::power;
  if (s == "perturbed-hopf") return FieldKind::perturbed_hopf;
  throw ConfigError("unknown field kind '" + s + "'");
}

Vec default_pole(int n) {
  if (n < 1) throw DomainError("field: n must be >= 1");
  return unit_vector(static_cast<std::size_t>(2 * n + 2), static_cast<std::size_t>(2 * n + 1));
}

VectorFieldSpec VectorFieldSpec::hopf(int n) {
  VectorFieldSpec s;
  s.kind = FieldKind::hopf;
  s.n = n;
  return s;
}

VectorFieldSpec VectorFieldSpec::radial(int n, Vec q) {
  VectorFieldSpec s;
  s.kind = FieldKind::radial;
  s.n = n;
  s.pole = std::move(q);
  return s;
}

VectorFieldSpec VectorFieldSpec::power(int n, int d, Vec p) {
  VectorFieldSpec s;
  s.kind = FieldKind::power;
  s.n = n;
  s.d = d;
  s.pole = std::move(p);
  return s;
}

VectorFieldSpec VectorFieldSpec::perturbed_hopf(int n, double eps, std::uint64_t seed) {
  VectorFieldSpec s;
  s.kind = FieldKind::perturbed_hopf;
  s.n = n;
  s.eps = eps;
  s.seed = seed;
  return s;
}

nlohmann::json VectorFieldSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["n"] = n;
  if (kind == FieldKind::radial || kind == FieldKind::power) j["pole"] = pole;
  if (kind == FieldKind::power) j["d"] = d;
  if (kind == FieldKind::perturbed_hopf) {
    j["eps"] = eps;
    j["seed"] = seed;
  }
  j["derivative"] = {{"mode", mode == DerivativeMode::analytic ? "analytic" : "central-difference"},
                     {"h", h}};
  return j;
}

VectorFieldSpec VectorFieldSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("field: expected a JSON object");
  try {
    const FieldKind kind = field_kind_from_string(j.at("kind").get<std::string>());
    const int n = j.value("n", 1);
    VectorFieldSpec s;
    switch (kind) {
      case FieldKind::hopf: s = hopf(n); break;
      case FieldKind::radial: s = radial(n, j.contains("pole") ? j.at("pole").get<Vec>() : default_pole(n)); break;
      case FieldKind::power:
        s = power(n, j.value("d", 1), j.contains("pole") ? j.at("pole").get<Vec>() : default_pole(n));
        break;
      case FieldKind::perturbed_hopf:
        s = perturbed_hopf(n, j.value("eps", 0.2), j.value("seed", std::uint64_t{0}));
        break;
    }
    if (j.contains("derivative")) {
      const auto& dj = j.at("derivative");
      const std::string mode = dj.value("mode", std::string("analytic"));
      if (mode == "analytic") s.mode = DerivativeMode::analytic;
      else if (mode == "central-difference") s.mode = DerivativeMode::central_difference;
      else throw ConfigError("field: unknown derivative mode '" + mode + "'");
      s.h = dj.value("h", s.h);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
}

VectorField::VectorField(VectorFieldSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1) throw DomainError("field: n must be >= 1");
  if (!(spec_.h > 0.0)) throw DomainError("field: derivative step must be positive");
  const std::size_t dim = ambient_dim();
  switch (spec_.kind) {
    case FieldKind::hopf: break;
    case FieldKind::radial:
    case FieldKind::power: {
      if (spec_.pole.size() != dim) throw DomainError("field: pole must have 2n+2 coordinates");
      const SpherePoint p = SpherePoint::normalized(spec_.pole);
      spec_.pole = p.vec();
      singular_points_ = {p, SpherePoint::normalized(scaled(p.coords(), -1.0))};
      if (spec_.kind == FieldKind::power) {
        if (spec_.d < 1) throw DomainError("field: power exponent must be >= 1");
        chart_basis_ = sphere::pole_basis(p);
      }
      break;
    }
    case FieldKind::perturbed_hopf: {
      if (!(spec_.eps >= 0.0 && spec_.eps < 1.0)) throw DomainError("field: eps must lie in [0, 1)");
      CounterRng rng(spec_.seed, 0);
      w0_.assign(dim, 0.0);
      for (std::size_t c = 0; c < dim; c += 2) {
        auto [a, b] = rng.normal_pair();
        w0_[c] = a;
        if (c + 1 < dim) w0_[c + 1] = b;
      }
      const double r = norm(w0_);
      for (double& t : w0_) t /= r;
      break;
    }
  }
}

std::vector<SpherePoint> VectorField::singular_points() const { return singular_points_; }

double VectorField::singular_distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : singular_points_) best = std::min(best, sphere::geodesic_distance(x, s.coords()));
  return best;
}

void VectorField::check_regular(std::span<const double> x) const {
  if (x.size() != ambient_dim()) throw DomainError("field: point has the wrong dimension");
  if (singular_distance(x) <= kSingularTolerance)
    throw SingularityError("field: evaluation within 1e-8 of a singular point");
}

namespace {

void apply_hopf(std::span<const double> x, std::span<double> v) {
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    v[i] = -x[i + 1];
    v[i + 1] = x[i];
  }
}

SmallMatrix hopf_matrix(std::size_t dim) {
  SmallMatrix j(dim, dim);
  for (std::size_t i = 0; i + 1 < dim; i += 2) {
    j(i, i + 1) = -1.0;
    j(i + 1, i) = 1.0;
  }
  return j;
}

}  // namespace

namespace {

// Forward-mode dual number: exact directional derivatives of the chart formula.
struct Dual {
  double v = 0.0, d = 0.0;
  Dual() = default;
  Dual(double value, double deriv = 0.0) : v(value), d(deriv) {}
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual sqrt(Dual a) {
  const double r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

// Stereographic chart from -p: x = ((1 - rho) p + 2 B Y) / (1 + rho), with
// the pushforward of g = (Re z^d, Im z^d, |Y|^{d-1} w), tangent-projected and
// normalized. Off the sphere x is first rescaled to unit length.
template <class T>
std::vector<T> power_extension(const std::vector<T>& x, std::span<const double> p,
                               const std::vector<Vec>& basis, int d) {
  using std::sqrt;
  const std::size_t dim = x.size(), k = basis.size();
  T r2(0.0);
  for (const T& t : x) r2 = r2 + t * t;
  const T r = sqrt(r2);
  std::vector<T> u(dim);
  for (std::size_t i = 0; i < dim; ++i) u[i] = x[i] / r;
  T denom(0.0);  // 1 + <p, u>, without cancellation near -p
  for (std::size_t i = 0; i < dim; ++i) {
    const T s = u[i] + T(p[i]);
    denom = denom + s * s;
  }
  denom = denom * T(0.5);
  std::vector<T> y(k), g(k);
  for (std::size_t a = 0; a < k; ++a) {
    T s(0.0);
    for (std::size_t i = 0; i < dim; ++i) s = s + T(basis[a][i]) * u[i];
    y[a] = s / denom;
  }
  T zr(1.0), zi(0.0);
  for (int i = 0; i < d; ++i) {
    const T nr = zr * y[0] - zi * y[1];
    zi = zr * y[1] + zi * y[0];
    zr = nr;
  }
  T rho(0.0);
  for (std::size_t a = 0; a < k; ++a) rho = rho + y[a] * y[a];
  // |Y|^{d-1} w keeps g homogeneous of degree d, so the direction field is
  // scale invariant near both poles
  T lift(1.0);
  const T ry = sqrt(rho);
  for (int i = 1; i < d; ++i) lift = lift * ry;
  g[0] = zr;
  g[1] = zi;
  for (std::size_t a = 2; a < k; ++a) g[a] = lift * y[a];
  T yg(0.0);
  for (std::size_t a = 0; a < k; ++a) yg = yg + y[a] * g[a];
  std::vector<T> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = T(-2.0) * yg * T(p[i]);
  for (std::size_t a = 0; a < k; ++a) {
    const T c = (T(1.0) + rho) * g[a] - T(2.0) * yg * y[a];
    for (std::size_t i = 0; i < dim; ++i) out[i] = out[i] + c * T(basis[a][i]);
  }
  T ou(0.0);
  for (std::size_t i = 0; i < dim; ++i) ou = ou + out[i] * u[i];
  T len2(0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = out[i] - ou * u[i];
    len2 = len2 + out[i] * out[i];
  }
  const T len = sqrt(len2);
  for (std::size_t i = 0; i < dim; ++i) out[i] = out[i] / len;
  return out;
}

}  // namespace

Vec VectorField::extension(std::span<const double> x) const {
  const std::size_t dim = ambient_dim();
  Vec v(dim, 0.0);
  switch (spec_.kind) {
    case FieldKind::hopf:
      apply_hopf(x, v);
      return v;
    case FieldKind::radial: {
      const auto q = singular_points_[0].coords();
      const double c = dot(q, x);
      const double s = std::sqrt(1.0 - c * c);
      for (std::size_t i = 0; i < dim; ++i) v[i] = (c * x[i] - q[i]) / s;
      return v;
    }
    case FieldKind::power:
      return power_extension(Vec(x.begin(), x.end()), singular_points_[0].coords(), chart_basis_, spec_.d);
    case FieldKind::perturbed_hopf: {
      apply_hopf(x, v);
      const double wx = dot(w0_, x);
      for (std::size_t i = 0; i < dim; ++i) v[i] += spec_.eps * (w0_[i] - wx * x[i]);
      const double len = norm(v);
      for (double& t : v) t /= len;
      return v;
    }
  }
  return v;
}

Vec VectorField::eval(std::span<const double> x) const {
  check_regular(x);
  if (spec_.kind == FieldKind::radial) {
    // on the sphere sqrt(1 - c^2) = |q - c x|, which stays accurate near +-q
    const auto q = singular_points_[0].coords();
    const double c = dot(q, x);
    Vec t(q.begin(), q.end());
    axpy(-c, x, t);
    const double s = norm(t);
    for (double& e : t) e /= -s;
    return t;
  }
  return extension(x);
}

SmallMatrix VectorField::analytic_jacobian(std::span<const double> x) const {
  const std::size_t dim = ambient_dim();
  SmallMatrix jac(dim, dim);
  switch (spec_.kind) {
    case FieldKind::hopf: return hopf_matrix(dim);
    case FieldKind::radial: {
      // d/dx (c x - q)/s = (x q^T + c I)/s + (c x - q)(c q^T)/s^3
      const auto q = singular_points_[0].coords();
      const double c = dot(q, x);
      Vec t(q.begin(), q.end());
      axpy(-c, x, t);
      const double s = norm(t);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j)
          jac(i, j) = x[i] * q[j] / s - t[i] * c * q[j] / (s * s * s);
        jac(i, i) += c / s;
      }
      return jac;
    }
    case FieldKind::perturbed_hopf: {
      Vec u(dim, 0.0);
      apply_hopf(x, u);
      const double wx = dot(w0_, x);
      for (std::size_t i = 0; i < dim; ++i) u[i] += spec_.eps * (w0_[i] - wx * x[i]);
      const double len = norm(u);
      SmallMatrix du = hopf_matrix(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) du(i, j) -= spec_.eps * x[i] * w0_[j];
        du(i, i) -= spec_.eps * wx;
      }
      // (I - v v^T) dU / |U|
      Vec v = scaled(u, 1.0 / len);
      for (std::size_t j = 0; j < dim; ++j) {
        double vd = 0.0;
        for (std::size_t i = 0; i < dim; ++i) vd += v[i] * du(i, j);
        for (std::size_t i = 0; i < dim; ++i) jac(i, j) = (du(i, j) - v[i] * vd) / len;
      }
      return jac;
    }
    case FieldKind::power: {
      std::vector<Dual> xd(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < dim; ++i) xd[i] = Dual(x[i], i == j ? 1.0 : 0.0);
        const auto col = power_extension(xd, singular_points_[0].coords(), chart_basis_, spec_.d);
        for (std::size_t i = 0; i < dim; ++i) jac(i, j) = col[i].d;
      }
      return jac;
    }
  }
  return jac;
}

SmallMatrix VectorField::fd_jacobian(std::span<const double> x) const {
  // the step shrinks with the distance to the singular set so the O(h^2)
  // error stays relative to the local derivative scale
  const std::size_t dim = ambient_dim();
  const double h = spec_.h * std::min(1.0, singular_distance(x));
  SmallMatrix jac(dim, dim);
  Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (std::size_t j = 0; j < dim; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const Vec vp = extension(xp), vm = extension(xm);
    for (std::size_t i = 0; i < dim; ++i) jac(i, j) = (vp[i] - vm[i]) / (2.0 * h);
    xp[j] = xm[j] = x[j];
  }
  return jac;
}

SmallMatrix VectorField::jacobian(std::span<const double> x) const {
  check_regular(x);
  return spec_.mode == DerivativeMode::analytic ? analytic_jacobian(x) : fd_jacobian(x);
}

matrixkit::ShapeArray shape_matrix(const VectorField& f, std::span<const double> x,
                                   const std::vector<Vec>& frame) {
  const std::size_t m = static_cast<std::size_t>(2 * f.n() + 1);
  if (frame.size() != m) throw DomainError("shape_matrix: frame must have 2n+1 vectors");
  const SmallMatrix jac = f.jacobian(x);
  const std::size_t dim = f.ambient_dim();
  SmallMatrix a(m, m);
  Vec col(dim);
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += jac(i, j) * frame[b][j];
      col[i] = s;
    }
    for (std::size_t r = 0; r < m; ++r) a(r, b) = dot(frame[r], col);
  }
  return matrixkit::ShapeArray(f.n(), std::move(a));
}

matrixkit::ShapeArray shape_matrix(const VectorField& f, const SpherePoint& x,
                                   const sphere::AdaptedFrame& frame) {
  return shape_matrix(f, x.coords(), frame.e);
}

}  // namespace puncvol::fields
