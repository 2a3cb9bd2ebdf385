#pragma once

// Non-positive-definiteness witnesses: sample equidistributed points on a
// closed geodesic, build the Gram matrix, and exhibit a negative eigenvalue
// either directly or through comparison with the circle's circulant matrix.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geok/geodesics.hpp"
#include "geok/kernels.hpp"
#include "geok/numerics.hpp"
#include "geok/spaces.hpp"

namespace geok {

enum class WitnessMode { direct, certified, automatic };

std::string_view to_string(WitnessMode mode) noexcept;
WitnessMode parse_witness_mode(std::string_view text);

struct LoopDescriptor {
  std::string kind;        // e.g. "great-circle", "systole", "shortened"
  double length = 0.0;
  std::vector<long> cls;   // winding vector; empty when the space has none
};

struct CanonicalLoop {
  LoopDescriptor descriptor;
  bool analytic = true;     // distances along the loop follow the circle law exactly
  std::optional<Loop> polygon;  // surfaces only
  std::function<std::vector<Point>(std::size_t)> sample;  // N points at arclength spacing L/N
};

struct CanonicalLoopOptions {
  std::size_t vertices = 512;       // polygon size for the torus of revolution
  ShorteningOptions shortening{.perturb = true};
};

/// Errc::unsupported for hyperboloid, spd_stein and finite spaces.
CanonicalLoop canonical_loop(const SpaceSpec& space, const CanonicalLoopOptions& opts = {});

/// Loop-restricted distances of N equidistributed points: (L/N) circmin(i - j).
DistanceMatrix circle_law(std::size_t n, double length);

struct WitnessRequest {
  SpaceSpec space;
  double lambda = 0.0;
  double q = 2.0;
  std::size_t n_max = 4096;
  WitnessMode mode = WitnessMode::automatic;
  std::size_t direct_cap = 128;  // largest N eigensolved densely in automatic mode
  CanonicalLoopOptions loop;
};

/// Throws Errc::invalid_argument unless lambda > 0, q > 0, n_max >= 4 and
/// n_max is divisible by 4.
void validate(const WitnessRequest& req);

struct ScanStep {
  std::size_t n = 0;
  double lambda_min = 0.0;  // direct value, or the circulant value when only that was computed
  bool direct = false;
};

struct WitnessReport {
  std::string space;
  double lambda = 0.0;
  double q = 2.0;
  bool found = false;
  std::optional<std::size_t> n;
  std::optional<double> lambda_min;
  LoopDescriptor loop;
  double lambda_eff = 0.0;
  std::optional<PerturbationCertificate> certificate;
  std::optional<double> epsilon_observed;
  std::optional<double> max_abs_deviation;
  std::optional<bool> lipschitz_consistent;  // delta <= C0(lambda) * max |restricted - ambient|
  std::vector<Point> points;
  std::vector<ScanStep> trace;
  WitnessMode mode = WitnessMode::automatic;  // route that produced the verdict
  double grid_pitch = 0.0;                    // ambient grid, torus of revolution only
  std::string note;
};

/// Scans N = 4, 8, ..., n_max on the circle of radius rho by the circulant
/// spectrum with lambda_eff = lambda rho^2.
WitnessReport witness_on_circle(double rho, double lambda, std::size_t n_max, double q = 2.0);

WitnessReport run_witness(const WitnessRequest& req);

/// Single-N certified evaluation; also eigensolves G directly to confirm.
WitnessReport certified_run(const SpaceSpec& space, double lambda, std::size_t n, double q = 2.0,
                            const CanonicalLoopOptions& loop = {});

}  // namespace geok
