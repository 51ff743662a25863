#pragma once

// Analytic unit tangent fields on S^{2n+1} and the shape-array assembler.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/matrixkit.hpp"
#include "puncvol/spherekit.hpp"
#include "puncvol/vec.hpp"

namespace puncvol::fields {

using sphere::SpherePoint;

enum class FieldKind { hopf, radial, power, perturbed_hopf };
enum class DerivativeMode { analytic, central_difference };

std::string to_string(FieldKind k);
FieldKind field_kind_from_string(const std::string& s);

/// Closest a field may be evaluated to its singular set.
inline constexpr double kSingularTolerance = 1e-8;

struct VectorFieldSpec {
  FieldKind kind = FieldKind::hopf;
  int n = 1;
  Vec pole;                 // q for radial, p for power; empty otherwise
  int d = 1;                // power exponent
  double eps = 0.2;         // perturbed-hopf amplitude
  std::uint64_t seed = 0;   // perturbed-hopf direction
  DerivativeMode mode = DerivativeMode::analytic;  // power uses forward-mode dual numbers
  double h = 1e-5;

  static VectorFieldSpec hopf(int n);
  static VectorFieldSpec radial(int n, Vec q);
  static VectorFieldSpec power(int n, int d, Vec p);
  static VectorFieldSpec perturbed_hopf(int n, double eps, std::uint64_t seed);

  nlohmann::json to_json() const;
  static VectorFieldSpec from_json(const nlohmann::json& j);
  friend bool operator==(const VectorFieldSpec&, const VectorFieldSpec&) = default;
};

/// The north pole (0, ..., 0, 1) of S^{2n+1}.
Vec default_pole(int n);

/// A validated field with its precomputed constants.
class VectorField {
 public:
  explicit VectorField(VectorFieldSpec spec);

  const VectorFieldSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  std::size_t ambient_dim() const { return static_cast<std::size_t>(2 * spec_.n + 2); }

  /// {+-q} for radial, {+-p} for power, empty otherwise.
  std::vector<SpherePoint> singular_points() const;
  /// Geodesic distance to the singular set (infinity when empty).
  double singular_distance(std::span<const double> x) const;
  bool has_singularities() const { return !singular_points_.empty(); }

  /// Unit tangent v(x). Throws SingularityError within 1e-8 of the singular set.
  Vec eval(std::span<const double> x) const;

  /// Derivative of the ambient extension used by eval, (2n+2)x(2n+2).
  matrixkit::SmallMatrix jacobian(std::span<const double> x) const;

  const Vec& perturbation() const { return w0_; }

 private:
  void check_regular(std::span<const double> x) const;
  Vec extension(std::span<const double> x) const;
  matrixkit::SmallMatrix analytic_jacobian(std::span<const double> x) const;
  matrixkit::SmallMatrix fd_jacobian(std::span<const double> x) const;

  VectorFieldSpec spec_;
  std::vector<SpherePoint> singular_points_;
  std::vector<Vec> chart_basis_;  // power: orthonormal basis of p^perp
  Vec w0_;                        // perturbed-hopf: seeded unit vector
};

/// a_AB = <Jacobian e_B, e_A> for a frame of 2n+1 tangent vectors whose last
/// member is v(x).
matrixkit::ShapeArray shape_matrix(const VectorField& f, std::span<const double> x,
                                   const std::vector<Vec>& frame);

/// shape_matrix in the adapted frame.
matrixkit::ShapeArray shape_matrix(const VectorField& f, const SpherePoint& x,
                                   const sphere::AdaptedFrame& frame);

}  // namespace puncvol::fields
