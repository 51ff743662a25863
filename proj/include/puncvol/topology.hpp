#pragma once

// Brouwer degree by the Kronecker integral, and Poincare indices of isolated
// field singularities through the exponential chart.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/fields.hpp"
#include "puncvol/spherekit.hpp"

namespace puncvol::topology {

using sphere::GridSpec;
using sphere::SpherePoint;

/// F: S^m -> S^m given by ambient coordinates; derivatives are central
/// differences along geodesics with step h.
struct SphereMap {
  int m = 2;
  std::function<Vec(std::span<const double>)> eval;
  double h = 1e-5;
};

SphereMap identity_map(int m);
SphereMap antipodal_map(int m);
/// (z, t) -> normalize(z^d, t) on S^2, degree d.
SphereMap suspension_power_map(int d);

GridSpec default_degree_grid(int m);

/// (1/vol S^m) sum_nodes w det[F, dF b_1, ..., dF b_m].
double kronecker_degree(const SphereMap& f, const GridSpec& spec);

struct IndexReport {
  Vec point;
  double radius = 0.0;
  double raw_degree = 0.0;
  int index = 0;
  double residual = 0.0;
  nlohmann::json grid;

  nlohmann::json to_json() const;
};

inline constexpr double kIndexResidualTolerance = 1e-2;

/// Degree of y -> unit(chart coordinates of v(exp_p(radius y))) on S^{2n}.
/// `chart` overrides the orthonormal basis of T_p (default pole_basis(p)).
/// Throws ConfigError when the geodesic ball of twice the radius reaches
/// another singular point, or radius is outside (0, pi/2).
IndexReport field_index(const fields::VectorField& f, const SpherePoint& p, double radius,
                        const GridSpec& spec, const std::optional<std::vector<Vec>>& chart = std::nullopt);

}  // namespace puncvol::topology
