#pragma once

// Geodesic distance oracles for model manifolds and finite metric spaces.
//
// Point coordinate layouts, by kind:
//   circle            angle in [0, 2pi)
//   sphere/projective unit vector in R^{n+1}
//   flat_torus        fractional lattice coordinates in [0, 1)^d
//   revolution_torus  (theta, phi) in [0, 2pi)^2; theta runs around the tube
//   hyperboloid       x in R^{n+1} with -x0^2 + |x'|^2 = -1, x0 > 0
//   grassmannian      orthonormal n x k frame, row-major
//   spd_stein         symmetric positive definite n x n matrix, row-major
//   finite            `index` into the point list; coords unused

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geok/numerics.hpp"

namespace geok {

enum class SpaceKind {
  circle,
  sphere,
  projective,
  flat_torus,
  revolution_torus,
  hyperboloid,
  grassmannian,
  spd_stein,
  finite,
};

std::string_view to_string(SpaceKind kind) noexcept;

class DistanceMatrix;
struct FiniteMetricSpace;

struct SpaceSpec {
  SpaceKind kind = SpaceKind::circle;
  double radius = 1.0;          // circle
  std::size_t n = 0;            // sphere/projective/hyperboloid dimension, spd size, Gr ambient n
  std::size_t k = 0;            // Gr(k, n)
  std::size_t d = 0;            // flat torus dimension
  std::vector<double> basis;    // flat torus, row-major d x d, rows are lattice vectors
  double a = 0.0, b = 0.0;      // revolution torus radii, a > b > 0
  double grid_pitch = kPi / 32; // revolution torus ambient-distance grid
  std::shared_ptr<const FiniteMetricSpace> finite;

  static SpaceSpec circle(double radius);
  static SpaceSpec sphere(std::size_t n);
  static SpaceSpec projective(std::size_t n);
  static SpaceSpec flat_torus(std::size_t d, std::vector<double> basis_row_major);
  static SpaceSpec revolution_torus(double a, double b);
  static SpaceSpec hyperboloid(std::size_t n);
  static SpaceSpec grassmannian(std::size_t k, std::size_t n);
  static SpaceSpec spd_stein(std::size_t n);
  static SpaceSpec finite_space(std::shared_ptr<const FiniteMetricSpace> space);

  /// Number of coordinates a Point of this space carries.
  std::size_t coord_count() const noexcept;
  /// Command-line form, e.g. "sphere:2" or "rev-torus:3,1".
  std::string describe() const;
};

/// Parses the command-line space syntax: `sphere:<n>`, `circle:<rho>`,
/// `projective:<n>`, `flat-torus:<row-major basis>`, `rev-torus:<a>,<b>`,
/// `grassmann:<k>,<n>`, `hyperboloid:<n>`, `spd-stein:<n>`, `finite:<path>`.
SpaceSpec parse_space(std::string_view text);

struct Point {
  SpaceKind kind = SpaceKind::circle;
  std::vector<double> coords;
  std::size_t index = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

Point circle_point(double angle);
Point unit_vector_point(SpaceKind kind, std::vector<double> v);  // sphere or projective
Point torus_point(SpaceKind kind, std::vector<double> chart);    // reduces modulo the period
Point finite_point(std::size_t index);

/// Throws Errc::kind_mismatch or Errc::invalid_point.
void validate_point(const SpaceSpec& space, const Point& p);

/// Symmetric, nonnegative, zero-diagonal matrix of pairwise distances.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  /// Throws Errc::invalid_argument unless the matrix is symmetric, finite,
  /// nonnegative and zero on the diagonal.
  static DistanceMatrix from_dense(std::size_t n, std::vector<double> row_major);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  const std::vector<double>& dense() const noexcept { return data_; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct FiniteMetricSpace {
  DistanceMatrix matrix{1};
  std::vector<std::string> labels;  // empty when the source carried none
  std::string source;               // file path, for echoing in reports

  std::size_t size() const noexcept { return matrix.size(); }
};

double distance(const SpaceSpec& space, const Point& p, const Point& q);
DistanceMatrix pairwise_distances(const SpaceSpec& space, const std::vector<Point>& pts);

/// Deterministic per seed. Throws Errc::unsupported for a finite space when
/// n exceeds its size.
std::vector<Point> sample_points(const SpaceSpec& space, std::size_t n, std::uint64_t seed);

struct MetricViolation {
  std::size_t from = 0, to = 0, via = 0;  // d(from,to) > d(from,via) + d(via,to) + tol
  friend bool operator==(const MetricViolation&, const MetricViolation&) = default;
};

/// Every triangle violation, reported once per unordered endpoint pair
/// (from < to) and intermediate point, in lexicographic order.
std::vector<MetricViolation> validate_metric(const DistanceMatrix& d, double tol);

/// Finite-metric text format: first non-comment line `n`, then the strictly
/// lower triangle, one row per line (row i carries i distances, so row 0 is
/// empty and may be omitted). Rows may instead include the trailing zero
/// diagonal. Lines starting with '#' are ignored.
/// `read_distance_matrix` parses only; `parse_finite_metric` additionally
/// rejects triangle violations above 1e-12 with Errc::metric_violation.
DistanceMatrix read_distance_matrix(std::istream& in);
FiniteMetricSpace parse_finite_metric(std::istream& in, std::string source = {});
FiniteMetricSpace load_finite_metric(const std::string& path);
void write_finite_metric(std::ostream& out, const DistanceMatrix& d);

/// Rows of `basis` (d x d) form an LLL-reduced basis with delta = 3/4.
bool is_lll_reduced(std::size_t d, const std::vector<double>& basis);

}  // namespace geok
