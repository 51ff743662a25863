#pragma once

// Volume functional and Euler-form flux through parallels.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/fields.hpp"
#include "puncvol/spherekit.hpp"

namespace puncvol::functionals {

using fields::VectorField;
using sphere::GridSpec;
using sphere::SpherePoint;

/// sqrt(det(I + A^T A)) for the tangent shape array A of f at x.
double volume_integrand(const VectorField& f, std::span<const double> x);

struct VolumeEstimate {
  double value = 0.0;
  double error = 0.0;            // refinement delta, or MC standard error
  std::string error_kind;        // "refinement" | "stderr"
  double normalized = 0.0;       // value / vol(S^{2n+1})
  std::size_t nodes = 0;
  nlohmann::json grid;
  nlohmann::json field;
  std::optional<std::uint64_t> seed;

  nlohmann::json to_json() const;
  static VolumeEstimate from_json(const nlohmann::json& j);
  friend bool operator==(const VolumeEstimate&, const VolumeEstimate&) = default;
};

/// Product grid for nonsingular fields, sliced grid around the first
/// singular point otherwise.
GridSpec default_volume_grid(const VectorField& f);

/// Weighted sum over the grid. Singular fields need a sliced grid about one
/// of their singular points (the first is used); Monte Carlo is refused for
/// them because the integrand has unbounded second moment.
VolumeEstimate volume(const VectorField& f, const GridSpec& spec);

/// Plain weighted sum on one grid, same grid rules as volume(), no error estimate.
double integrate_volume(const VectorField& f, const GridSpec& spec);

/// sum_k C(n,k)/C(2n,2k) |sigma_2k(a_ij)|.
double bcn_density(const VectorField& f, std::span<const double> x);

/// Pullback of the Euler form to the parallel through x, per unit area, with
/// the parallel oriented as the boundary of the ball around `pole`.
double flux_density(const VectorField& f, const SpherePoint& x, const SpherePoint& pole);

GridSpec default_parallel_grid(int n);

double parallel_flux(const VectorField& f, const SpherePoint& pole, double theta, const GridSpec& spec);

inline constexpr std::array<double, 3> kPoleColatitudes{0.2, 0.1, 0.05};

struct PoleLimit {
  std::vector<double> colatitudes;
  std::vector<double> fluxes;  // ball-around-pole orientation
  double limit = 0.0;          // fit a + b r^2, value a, ball-around-pole orientation
  double limit_reversed = 0.0; // same limit in the opposite orientation
  double index_estimate = 0.0; // limit / 2 in the orientation of the ball around the nearby point
};

struct FluxScan {
  Vec pole;
  std::vector<double> thetas;
  std::vector<double> fluxes;
  double deviation = 0.0;
  PoleLimit north;  // near the pole
  PoleLimit south;  // near the antipode
  nlohmann::json grid;

  nlohmann::json to_json() const;
};

/// Least-squares fit of a + b r^2; returns a.
double extrapolate_r2(std::span<const double> r, std::span<const double> values);

FluxScan stokes_scan(const VectorField& f, const SpherePoint& pole, const std::vector<double>& thetas,
                     const GridSpec& spec);

}  // namespace puncvol::functionals
