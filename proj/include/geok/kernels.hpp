#pragma once

// Power-exponential kernels k(x, y) = exp(-lambda d(x, y)^q), their Gram
// matrices, and randomized scans for negative eigenvalues over a rate grid.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geok/numerics.hpp"
#include "geok/spaces.hpp"

namespace geok {

struct KernelSpec {
  double q = 2.0;       // exponent, > 0; q = 2 is the Gaussian kernel
  double lambda = 1.0;  // rate, > 0
};

/// Throws Errc::invalid_argument unless q > 0 and lambda > 0 (both finite).
void validate(const KernelSpec& k);

double kernel_value(const KernelSpec& k, double d) noexcept;

struct GramMatrix {
  SymmetricMatrix matrix{1};
  KernelSpec kernel;
  std::string source;  // where the points came from
};

GramMatrix gram(const DistanceMatrix& d, const KernelSpec& k, std::string source = {});

/// sup over t >= 0 of |d/dt exp(-lambda t^2)|, i.e. sqrt(2 lambda / e).
double lipschitz_bound_C0(double lambda);

struct LambdaScanOptions {
  double q = 2.0;
  std::vector<std::size_t> n_schedule = {4, 8};  // ascending sample sizes
  std::uint64_t seed = 0;
  std::size_t budget = 100000;  // random samples per rate, split evenly over the schedule
  bool structured = true;       // try the canonical loop sample first when the space has one
  unsigned threads = 0;         // 0 = hardware concurrency
};

struct LambdaScanRecord {
  double lambda = 0.0;
  bool psd_observed = true;              // no witness within budget; never a proof
  double lambda_min = 0.0;               // witness value, or the smallest value seen
  std::optional<std::size_t> witness_n;  // present iff psd_observed is false
  std::uint64_t sample_seed = 0;         // seed of the witness sample (or of the smallest value seen)
  bool structured = false;               // witness came from the canonical loop
  std::size_t samples_used = 0;
  bool budget_exhausted = false;
};

struct LambdaScanReport {
  std::string space;
  LambdaScanOptions options;
  std::vector<LambdaScanRecord> records;  // one per grid point, in grid order
};

/// Seed of random trial `trial` at sample size `n`; sample_points(space, n,
/// trial_seed(...)) replays the sample.
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t trial) noexcept;

LambdaScanReport lambda_scan(const SpaceSpec& space, const std::vector<double>& grid,
                             const LambdaScanOptions& opts = {});

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace geok
