#pragma once

// Round-sphere geometry and quadrature.
//
// Conventions used throughout the project:
//  * S^m sits in R^{m+1}; for the odd spheres S^{2n+1} the ambient dimension
//    is 2n+2.
//  * S^m is oriented by the outward normal: (b_1..b_m) is positive at x iff
//    det[x, b_1, ..., b_m] > 0.
//  * A parallel around a pole p is oriented as the boundary of the geodesic
//    ball around p; its outward normal inside the sphere is -N, where N is
//    the pole-ward unit normal.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/vec.hpp"

namespace puncvol::sphere {

class SpherePoint {
 public:
  /// Throws DomainError unless | |x| - 1 | <= 1e-12.
  explicit SpherePoint(Vec x);
  /// Rescales x to unit length (x must be nonzero).
  static SpherePoint normalized(Vec x);

  std::span<const double> coords() const { return x_; }
  std::size_t ambient_dim() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  const Vec& vec() const { return x_; }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  struct Trusted {};
  SpherePoint(Vec x, Trusted) : x_(std::move(x)) {}
  Vec x_;
};

/// 2 pi^{(m+1)/2} / Gamma((m+1)/2).
double sphere_volume(int m);

/// w - <w, x> x.
Vec tangent_project(std::span<const double> x, std::span<const double> w);

/// Geodesic distance on the unit sphere.
double geodesic_distance(std::span<const double> x, std::span<const double> y);

/// det of the square matrix whose columns are the given vectors.
double column_determinant(const std::vector<Vec>& columns);

/// Greedy Gram-Schmidt completion: `count` unit vectors orthogonal to each
/// other and to every vector in `against` (assumed orthonormal), chosen from
/// the standard basis by largest residual.
std::vector<Vec> orthonormal_completion(const std::vector<Vec>& against, std::size_t dim,
                                        std::size_t count);

/// Orthonormal basis of T_x S^m, positively oriented.
std::vector<Vec> tangent_basis(std::span<const double> x);

/// Deterministic, positively oriented orthonormal basis of p^perp
/// (Gram-Schmidt of the standard basis in index order).
std::vector<Vec> pole_basis(const SpherePoint& p);

struct ParallelSpec {
  SpherePoint pole;
  double theta;  // latitude in (-pi/2, pi/2); colatitude r = pi/2 - theta
};

struct ParallelFrame {
  Vec normal;               // pole-ward unit normal N
  std::vector<Vec> basis;   // 2n boundary-oriented tangent vectors, then N
};

/// Throws DegeneratePointError when x = +-pole.
ParallelFrame parallel_frame(const SpherePoint& x, const SpherePoint& pole);

/// Frame {e_1..e_{2n-1}, e_2n, v} at x with e_1..e_{2n-1} tangent to the
/// parallel and orthogonal to v, sin(alpha) = <v, N>, and
/// u = sin(alpha) e_2n + cos(alpha) v tangent to the parallel.
struct AdaptedFrame {
  std::vector<Vec> e;             // 2n+1 vectors, e.back() == v
  Vec normal;                      // N
  double alpha = 0.0;              // in [-pi/2, pi/2]
  bool degenerate = false;         // |<v, N>| == 1 up to 1e-9: e_2n is any admissible completion
  int sphere_orientation = 1;      // sign of (e_1..e_2n, v) on S^{2n+1}
  int parallel_orientation = 1;    // sign of (e_1..e_{2n-1}, u) against the boundary orientation
};

/// Throws DomainError for non-unit or non-tangent v (tolerance 1e-9) and
/// DegeneratePointError at x = +-pole. The frame is positively oriented.
AdaptedFrame adapted_frame(const SpherePoint& x, const SpherePoint& pole, std::span<const double> v);

// ---------------------------------------------------------------- quadrature

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1 - t^2)^a on [-1, 1] (Golub-Welsch).
/// a = 0 is Gauss-Legendre.
Rule1D gauss_gegenbauer(int q, double a);
Rule1D gauss_legendre(int q);

enum class GridKind { product, parallel, sliced, monte_carlo };

std::string to_string(GridKind k);

/// Resolution descriptor, JSON-expressible, e.g.
/// {"kind":"sliced","slices":40,"parallel":[24,24,24,48],"seed":null}.
/// `axes` lists the polar axes followed by the azimuth: m entries for S^m.
struct GridSpec {
  GridKind kind = GridKind::product;
  std::vector<int> axes;
  int slices = 0;
  std::size_t count = 0;
  std::optional<std::uint64_t> seed;

  static GridSpec product(std::vector<int> axes);
  static GridSpec parallel(std::vector<int> axes);
  static GridSpec sliced(int slices, std::vector<int> parallel_axes);
  static GridSpec monte_carlo(std::size_t count, std::uint64_t seed);

  /// Every resolution halved (minimum 1).
  GridSpec halved() const;

  nlohmann::json to_json() const;
  static GridSpec from_json(const nlohmann::json& j);
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Immutable, lazily indexed grid: node(i) regenerates the i-th node in the
/// canonical axis-lexicographic order.
class QuadratureGrid {
 public:
  GridKind kind() const { return kind_; }
  /// Dimension of the manifold the weights integrate over.
  int manifold_dim() const { return manifold_dim_; }
  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t size() const;

  /// Writes the node coordinates into `x` (length ambient_dim) and returns its weight.
  double node(std::size_t i, std::span<double> x) const;
  SpherePoint point(std::size_t i) const;
  double weight(std::size_t i) const;

  /// Fixed-order pairwise sum of all weights.
  double total_weight() const;

  const GridSpec& spec() const { return spec_; }
  std::optional<SpherePoint> pole() const { return pole_; }
  std::optional<std::uint64_t> seed() const { return spec_.seed; }
  nlohmann::json descriptor() const;

  friend QuadratureGrid quad_sphere(int m, const GridSpec& spec);
  friend QuadratureGrid quad_parallel(const SpherePoint& pole, double theta, const GridSpec& spec);
  friend QuadratureGrid quad_sliced(const SpherePoint& pole, const GridSpec& spec);
  friend QuadratureGrid mc_sample(int m, std::size_t count, std::uint64_t seed);

 private:
  QuadratureGrid() = default;
  std::size_t core_size() const;
  double core_node(std::size_t j, std::span<double> y) const;

  GridKind kind_ = GridKind::product;
  GridSpec spec_;
  int manifold_dim_ = 0;
  std::size_t ambient_dim_ = 0;

  // product core on S^k
  int core_dim_ = 0;
  std::vector<Rule1D> polar_;
  std::vector<std::vector<double>> polar_sine_;  // sqrt(1 - t^2) per node
  int azimuth_ = 0;

  // embedding of the core: x = c_s p + s_s B y, weight factor f_s per slice
  std::optional<SpherePoint> pole_;
  std::vector<Vec> basis_;
  std::vector<double> slice_cos_, slice_sin_, slice_factor_;
  double theta_ = 0.0;

  // monte carlo
  std::size_t count_ = 0;
  std::uint64_t seed_ = 0;
};

/// Product grid on S^m: Gauss-Gegenbauer in each polar cosine, uniform
/// trapezoid in the azimuth. spec.axes has m entries.
QuadratureGrid quad_sphere(int m, const GridSpec& spec);

/// Product grid on the parallel S^{2n}_theta of S^{2n+1} around `pole`.
QuadratureGrid quad_parallel(const SpherePoint& pole, double theta, const GridSpec& spec);

/// Gauss-Legendre in colatitude r in (0, pi) composed with a parallel grid
/// per slice, slice weight sin^{2n} r. spec.slices, spec.axes (parallel).
QuadratureGrid quad_sliced(const SpherePoint& pole, const GridSpec& spec);

/// Uniform samples on S^m from normalized Gaussians; weight vol(S^m)/count.
QuadratureGrid mc_sample(int m, std::size_t count, std::uint64_t seed);

/// Dispatch on spec.kind (parallel grids need quad_parallel instead).
QuadratureGrid make_grid(int m, const GridSpec& spec, const std::optional<SpherePoint>& pole);

}  // namespace puncvol::sphere
