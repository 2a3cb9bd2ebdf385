#include "geok/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "geok/error.hpp"
#include "geok/rng.hpp"
#include "geok/witness.hpp"

namespace geok {

void validate(const KernelSpec& k) {
  if (!(k.q > 0.0) || !std::isfinite(k.q)) throw Error(Errc::invalid_argument, "kernel exponent q must be > 0");
  if (!(k.lambda > 0.0) || !std::isfinite(k.lambda))
    throw Error(Errc::invalid_argument, "kernel rate lambda must be > 0");
}

double kernel_value(const KernelSpec& k, double d) noexcept {
  const double p = k.q == 2.0 ? d * d : std::pow(d, k.q);
  return std::exp(-k.lambda * p);
}

GramMatrix gram(const DistanceMatrix& d, const KernelSpec& k, std::string source) {
  validate(k);
  const std::size_t n = d.size();
  GramMatrix g{SymmetricMatrix(n), k, std::move(source)};
  for (std::size_t i = 0; i < n; ++i) {
    g.matrix.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) g.matrix.set(i, j, kernel_value(k, d(i, j)));
  }
  return g;
}

double lipschitz_bound_C0(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::invalid_argument, "lambda must be > 0");
  return std::sqrt(2.0 * lambda / std::exp(1.0));
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t trial) noexcept {
  return derive_seed(base, n, trial);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw Error(Errc::invalid_argument, "log grid needs 0 < lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

double min_eigenvalue(const SpaceSpec& space, const std::vector<Point>& pts, const KernelSpec& k) {
  return jacobi_eigenvalues(gram(pairwise_distances(space, pts), k).matrix).min();
}

LambdaScanRecord scan_one(const SpaceSpec& space, double lambda, const LambdaScanOptions& opts,
                          const std::optional<CanonicalLoop>& loop) {
  const KernelSpec k{opts.q, lambda};
  LambdaScanRecord rec;
  rec.lambda = lambda;
  rec.lambda_min = INFINITY;
  auto observe = [&](double value, std::uint64_t seed) {
    if (value < rec.lambda_min) {
      rec.lambda_min = value;
      rec.sample_seed = seed;
    }
  };
  const std::size_t per_n = opts.budget / opts.n_schedule.size();
  const std::size_t limit = space.kind == SpaceKind::finite ? space.finite->size() : SIZE_MAX;
  for (std::size_t n : opts.n_schedule) {
    if (n > limit) break;
    if (loop) {
      const double v = min_eigenvalue(space, loop->sample(n), k);
      ++rec.samples_used;
      observe(v, 0);
      if (v < kWitnessThreshold) {
        rec.psd_observed = false;
        rec.witness_n = n;
        rec.structured = true;
        rec.lambda_min = v;
        rec.sample_seed = 0;
        return rec;
      }
    }
    for (std::size_t t = 0; t < per_n; ++t) {
      const std::uint64_t seed = trial_seed(opts.seed, n, t);
      const double v = min_eigenvalue(space, sample_points(space, n, seed), k);
      ++rec.samples_used;
      observe(v, seed);
      if (v < kWitnessThreshold) {
        rec.psd_observed = false;
        rec.witness_n = n;
        rec.lambda_min = v;
        rec.sample_seed = seed;
        return rec;
      }
    }
  }
  rec.budget_exhausted = true;
  return rec;
}

}  // namespace

LambdaScanReport lambda_scan(const SpaceSpec& space, const std::vector<double>& grid,
                             const LambdaScanOptions& opts) {
  if (grid.empty()) throw Error(Errc::invalid_argument, "lambda grid is empty");
  if (opts.n_schedule.empty()) throw Error(Errc::invalid_argument, "n schedule is empty");
  for (std::size_t i = 0; i < opts.n_schedule.size(); ++i) {
    if (opts.n_schedule[i] < 2) throw Error(Errc::invalid_argument, "schedule entries must be >= 2");
    if (i && opts.n_schedule[i] <= opts.n_schedule[i - 1])
      throw Error(Errc::invalid_argument, "n schedule must be strictly ascending");
  }
  for (double l : grid) validate(KernelSpec{opts.q, l});
  if (space.kind == SpaceKind::finite && space.finite->size() < opts.n_schedule.front())
    throw Error(Errc::unsupported, "finite space has fewer points than the smallest schedule entry");

  std::optional<CanonicalLoop> loop;
  if (opts.structured) {
    try {
      loop = canonical_loop(space);
    } catch (const Error& e) {
      if (e.code() != Errc::unsupported) throw;
    }
  }

  LambdaScanReport report{space.describe(), opts, std::vector<LambdaScanRecord>(grid.size())};
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        report.records[i] = scan_one(space, grid[i], opts, loop);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace geok
