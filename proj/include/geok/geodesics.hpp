#pragma once

// Closed polygonal loops on flat tori and tori of revolution: length, free
// homotopy class, Birkhoff shortening, arclength sampling, comparison of
// loop-restricted against ambient distances, and a grid-graph oracle for the
// ambient distance on a torus of revolution.
//
// Chart coordinates are lifted (never reduced modulo the period):
//   flat torus:        fractional lattice coordinates, period 1 per axis
//   revolution torus:  (theta, phi), period 2pi each; the surface is
//                      ((a + b cos theta) cos phi, (a + b cos theta) sin phi, b sin theta)

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "geok/spaces.hpp"

namespace geok {

using ChartPoint = std::vector<double>;

struct Loop {
  SpaceSpec surface;
  std::vector<ChartPoint> lifted;  // m >= 3 vertices; segment m-1 -> 0 closes the loop

  std::size_t size() const noexcept { return lifted.size(); }
  /// Coordinates reduced into the fundamental domain.
  std::vector<Point> vertices() const;
};

/// Integer winding vector. Flat torus: one entry per lattice axis.
/// Revolution torus: (turns around phi, turns around theta).
struct HomotopyClass {
  std::vector<long> winding;

  bool trivial() const noexcept;
  friend bool operator==(const HomotopyClass&, const HomotopyClass&) = default;
};

double chart_period(const SpaceSpec& surface);

/// Lifted displacement that the closing segment adds: vertex 0 of the next
/// turn sits at lifted[0] + closing_shift(loop).
ChartPoint closing_shift(const Loop& loop);

/// Throws Errc::ambiguous_lift when consecutive vertices are half a period
/// apart or more, or when the total displacement is not within 0.01 of a
/// whole number of periods.
HomotopyClass winding(const Loop& loop);

/// Length of the chart-linear segment p -> q (8-point Gauss-Legendre on the
/// torus of revolution, exact on flat tori).
double segment_length(const SpaceSpec& surface, const ChartPoint& p, const ChartPoint& q);
double loop_length(const Loop& loop);

/// Geodesic midpoint of two nearby chart points; analytic on flat tori, RK4
/// shooting on the torus of revolution (Errc::ode_failure when Newton stalls).
ChartPoint geodesic_midpoint(const SpaceSpec& surface, const ChartPoint& p, const ChartPoint& q);

struct ShorteningOptions {
  int max_iter = 20000;
  double step_tol = 1e-12;   // converged once an iteration shortens by less
  double max_move = 0.0;     // chart units; 0 selects period / 8
  bool perturb = false;      // shift theta by 0.05 first (torus of revolution only)
  bool coarse_to_fine = true;
  std::size_t coarse_vertices = 16;
};

struct ShorteningReport {
  double initial_length = 0.0;
  double final_length = 0.0;
  int iterations = 0;  // sweeps that moved the loop
  bool converged = false;
  bool contractible = false;
  HomotopyClass class_before, class_after;
};

struct ShorteningResult {
  Loop loop;
  ShorteningReport report;
};

/// Birkhoff shortening: odd then even vertices are replaced by the geodesic
/// midpoint of their neighbours, each move capped at max_move and kept only
/// if it strictly shortens the loop. With coarse_to_fine, a torus-of-revolution
/// loop whose size is coarse_vertices * 2^j is first shortened on every 2^j-th
/// vertex and refined by geodesic midpoints back to full size.
/// Throws Errc::class_changed if a step ever alters the winding vector.
ShorteningResult shorten_loop(const Loop& loop, const ShorteningOptions& opts = {});

/// Inserts the geodesic midpoint of every segment.
Loop refine_loop(const Loop& loop);

/// Straight loop along the lattice vector cls * basis, on m vertices.
Loop systole_loop(const SpaceSpec& flat_torus, const HomotopyClass& cls, std::size_t m = 64);

struct SystoleResult {
  double length = 0.0;
  HomotopyClass cls;
};

/// Shortest nonzero lattice vector over classes with entries in
/// [-radius, radius].
SystoleResult flat_torus_systole(const SpaceSpec& flat_torus, long radius = 3);

/// N chart points at arclength 0, L/N, 2L/N, ... starting from vertex 0.
std::vector<ChartPoint> equidistribute(const Loop& loop, std::size_t n);

/// Arclength position of a point on the loop; Errc::point_off_loop when it is
/// farther than `tol` (chart units) from every segment.
double arclength_position(const Loop& loop, const ChartPoint& x, double tol = 1e-8);

struct SpadeReport {
  double epsilon_observed = 0.0;  // max over pairs of (restricted - ambient)
  double max_abs_deviation = 0.0; // max over pairs of |restricted - ambient|
  double min_deviation = 0.0;
  std::size_t pairs_checked = 0;
  double tol_numeric = 0.0;
  bool one_sided = true;          // every deviation >= -tol_numeric
};

using DistanceOracle = std::function<DistanceMatrix(const std::vector<Point>&)>;

SpadeReport spade_from_distances(const DistanceMatrix& restricted, const DistanceMatrix& ambient,
                                 double tol_numeric);
SpadeReport spade_check(const Loop& loop, const std::vector<ChartPoint>& pts,
                        const DistanceOracle& ambient, double tol_numeric);

/// Ambient distance on a torus of revolution: Dijkstra over a periodic chart
/// grid with a 16-neighbour stencil. Query points off the grid are joined to
/// the surrounding 4x4 block of nodes. Edge lengths are Gauss-Legendre
/// lengths of the chart-linear segments, so a path on a grid is also a path
/// on every refinement of it.
class SurfaceGrid {
 public:
  static constexpr std::size_t kDefaultMaxNodes = 4096ull * 4096ull;

  /// Grid with round(2pi / h) nodes per axis; requires h <= pi/16.
  SurfaceGrid(double a, double b, double h, std::size_t max_nodes = kDefaultMaxNodes);

  double pitch() const noexcept { return pitch_; }
  std::size_t nodes_per_axis() const noexcept { return m_; }

  double distance(const ChartPoint& p, const ChartPoint& q) const;
  DistanceMatrix pairwise(const std::vector<ChartPoint>& pts) const;

 private:
  double a_, b_, pitch_;
  std::size_t m_;
  std::vector<double> edge_len_;  // [theta row][stencil index]
};

double surface_distance_approx(const SpaceSpec& surface, const ChartPoint& p, const ChartPoint& q,
                               double h);

/// Relative standard deviation of (a + b cos theta)^2 dphi/ds over the
/// segments of a torus-of-revolution loop.
double clairaut_relative_deviation(const Loop& loop);

/// Loop text format: `surface <kind> <params...>` (kinds `flat-torus`,
/// `rev-torus`; parameters separated by spaces or commas), then one line of
/// lifted coordinates per vertex. '#' starts a comment line.
Loop read_loop(std::istream& in);
void write_loop(std::ostream& out, const Loop& loop);

}  // namespace geok
