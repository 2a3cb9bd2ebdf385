#include "geok/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "geok/error.hpp"

namespace geok {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::non_convergence: return "NonConvergence";
    case Errc::asymmetric_row: return "AsymmetricRow";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::invalid_point: return "InvalidPoint";
    case Errc::kind_mismatch: return "KindMismatch";
    case Errc::unsupported: return "Unsupported";
    case Errc::parse_error: return "ParseError";
    case Errc::metric_violation: return "MetricViolation";
    case Errc::ambiguous_lift: return "AmbiguousLift";
    case Errc::class_changed: return "ClassChanged";
    case Errc::ode_failure: return "OdeFailure";
    case Errc::point_off_loop: return "PointOffLoop";
    case Errc::out_of_memory: return "OutOfMemory";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// SymmetricMatrix

SymmetricMatrix::SymmetricMatrix(std::size_t n, double fill) : n_(n), data_(n * (n + 1) / 2, fill) {
  if (n == 0) throw Error(Errc::invalid_argument, "matrix dimension must be >= 1");
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense(std::size_t n, std::span<const double> row_major) {
  if (row_major.size() != n * n) throw Error(Errc::invalid_argument, "dense array size != n*n");
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, row_major[i * n + j]);
  return m;
}

double SymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SymmetricMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    s += (*this)(i, i) * (*this)(i, i);
    for (std::size_t j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * (*this)(i, j);
  }
  return std::sqrt(s);
}

double SymmetricMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> SymmetricMatrix::to_dense() const {
  std::vector<double> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = (*this)(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// Jacobi

namespace {

Eigensystem run_jacobi(const SymmetricMatrix& m, const JacobiOptions& opts, bool want_vectors) {
  if (!(opts.tol > 0.0)) throw Error(Errc::invalid_argument, "Jacobi tolerance must be > 0");
  const std::size_t n = m.size();
  if (n > opts.max_size) {
    std::ostringstream os;
    os << "matrix dimension " << n << " exceeds cap " << opts.max_size;
    throw Error(Errc::invalid_argument, os.str());
  }
  std::vector<double> a = m.to_dense();
  for (double v : a)
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "matrix has non-finite entries");

  std::vector<double> v;
  if (want_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }

  const double fro = m.frobenius_norm();
  const double target = opts.tol * fro;
  auto off_max = [&] {
    double mx = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) mx = std::max(mx, std::abs(a[p * n + q]));
    return mx;
  };

  int sweeps = 0;
  double off = off_max();
  while (off > target && sweeps < opts.max_sweeps) {
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) <= 1e-3 * target) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = a[q * n + p] = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a[r * n + p];
          const double h = a[r * n + q];
          const double np = g - s * (h + g * tau);
          const double nq = h + s * (g - h * tau);
          a[r * n + p] = a[p * n + r] = np;
          a[r * n + q] = a[q * n + r] = nq;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            const double g = v[r * n + p];
            const double h = v[r * n + q];
            v[r * n + p] = g - s * (h + g * tau);
            v[r * n + q] = h + s * (g - h * tau);
          }
        }
      }
    }
    off = off_max();
  }

  const double residual = fro > 0.0 ? off / fro : 0.0;
  if (off > target) {
    std::ostringstream os;
    os << "off-diagonal residual " << residual << " > tol " << opts.tol << " after " << sweeps
       << " sweeps";
    throw Error(Errc::non_convergence, os.str());
  }

  // Ascending by value; equal values keep their diagonal order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

  Eigensystem out;
  out.spectrum.iterations = sweeps;
  out.spectrum.off_diag_residual = residual;
  out.spectrum.eigenvalues.reserve(n);
  for (std::size_t k : order) out.spectrum.eigenvalues.push_back(a[k * n + k]);
  if (want_vectors) {
    out.vectors.assign(n * n, 0.0);
    for (std::size_t col = 0; col < n; ++col)
      for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + col] = v[r * n + order[col]];
  }
  return out;
}

}  // namespace

Spectrum jacobi_eigenvalues(const SymmetricMatrix& m, const JacobiOptions& opts) {
  return run_jacobi(m, opts, false).spectrum;
}

Eigensystem jacobi_eigensystem(const SymmetricMatrix& m, const JacobiOptions& opts) {
  return run_jacobi(m, opts, true);
}

// ---------------------------------------------------------------------------
// Circulants

std::size_t circmin(long long m, std::size_t n) noexcept {
  const auto nn = static_cast<unsigned long long>(n);
  const unsigned long long r = static_cast<unsigned long long>(m < 0 ? -m : m) % nn;
  return static_cast<std::size_t>(std::min(r, nn - r));
}

std::vector<double> circulant_kernel_row(std::size_t n, double lambda_eff, double q) {
  if (n < 2) throw Error(Errc::invalid_argument, "circulant size must be >= 2");
  if (!(lambda_eff > 0.0) || !std::isfinite(lambda_eff))
    throw Error(Errc::invalid_argument, "lambda_eff must be > 0");
  if (!(q > 0.0)) throw Error(Errc::invalid_argument, "exponent q must be > 0");
  const double spacing = kTwoPi / static_cast<double>(n);
  std::vector<double> row(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = spacing * static_cast<double>(circmin(static_cast<long long>(j), n));
    const double dq = q == 2.0 ? d * d : std::pow(d, q);
    row[j] = std::exp(-lambda_eff * dq);
  }
  return row;
}

SymmetricMatrix circulant_from_row(std::span<const double> first_row) {
  const std::size_t n = first_row.size();
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, first_row[j - i]);
  return m;
}

SymmetricMatrix circulant_gaussian_matrix(std::size_t n, double lambda_eff) {
  const auto row = circulant_kernel_row(n, lambda_eff, 2.0);
  return circulant_from_row(row);
}

namespace {

void check_circulant_row(std::span<const double> c) {
  const std::size_t n = c.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty circulant row");
  for (std::size_t j = 1; j < n; ++j) {
    if (!std::isfinite(c[j])) throw Error(Errc::invalid_argument, "non-finite circulant entry");
    if (std::abs(c[j] - c[n - j]) > 1e-12) {
      std::ostringstream os;
      os << "c[" << j << "] = " << c[j] << " but c[" << n - j << "] = " << c[n - j];
      throw Error(Errc::asymmetric_row, os.str());
    }
  }
}

// mu_k = c_0 + 2 sum_{0<j<n/2} c_j cos(2 pi j k / n) + [n even] c_{n/2} (-1)^k,
// for k = 0..n/2; the remaining eigenvalues repeat (mu_k = mu_{n-k}).
std::vector<double> half_spectrum(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> cos_table(n);
  for (std::size_t m = 0; m < n; ++m)
    cos_table[m] = std::cos(kTwoPi * static_cast<double>(m) / static_cast<double>(n));
  const std::size_t half = n / 2;
  std::vector<double> mu(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    double s = c[0];
    std::size_t idx = 0;
    for (std::size_t j = 1; 2 * j < n; ++j) {
      idx += k;
      if (idx >= n) idx -= n;
      s += 2.0 * c[j] * cos_table[idx];
    }
    if (n % 2 == 0) s += (k % 2 == 0 ? 1.0 : -1.0) * c[half];
    mu[k] = s;
  }
  return mu;
}

}  // namespace

Spectrum circulant_spectrum(std::span<const double> first_row) {
  check_circulant_row(first_row);
  const std::size_t n = first_row.size();
  const auto mu = half_spectrum(first_row);
  Spectrum out;
  out.eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.eigenvalues[k] = mu[std::min(k, n - k)];
  std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

double circulant_min_eigenvalue(std::span<const double> first_row) {
  check_circulant_row(first_row);
  const auto mu = half_spectrum(first_row);
  return *std::min_element(mu.begin(), mu.end());
}

// ---------------------------------------------------------------------------
// PSD verdicts and certificates

double default_psd_tolerance(const SymmetricMatrix& m) noexcept {
  return 1e-10 * static_cast<double>(m.size()) * m.max_abs();
}

PsdVerdict psd_check(const SymmetricMatrix& m) { return psd_check(m, default_psd_tolerance(m)); }

PsdVerdict psd_check(const SymmetricMatrix& m, double tol) {
  if (!(tol >= 0.0)) throw Error(Errc::invalid_argument, "PSD tolerance must be >= 0");
  const Spectrum s = jacobi_eigenvalues(m);
  return PsdVerdict{s.min() >= -tol, s.min(), tol};
}

PerturbationCertificate weyl_certify(const Spectrum& reference, double inf_norm_delta,
                                     std::size_t n) {
  if (!(inf_norm_delta >= 0.0))
    throw Error(Errc::invalid_argument, "inf_norm_delta must be >= 0");
  if (reference.eigenvalues.size() != n)
    throw Error(Errc::invalid_argument, "reference spectrum dimension != n");
  PerturbationCertificate c;
  c.lambda_min_reference = reference.min();
  c.inf_norm_delta = inf_norm_delta;
  c.n = n;
  c.certified_bound = c.lambda_min_reference + static_cast<double>(n) * inf_norm_delta;
  c.fires = c.certified_bound < 0.0;
  return c;
}

double inf_norm_diff(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.size() != b.size()) throw Error(Errc::invalid_argument, "dimension mismatch");
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) mx = std::max(mx, std::abs(a(i, j) - b(i, j)));
  return mx;
}

double spd_logdet(std::span<const double> a, std::size_t n) {
  if (a.size() != n * n) throw Error(Errc::invalid_argument, "dense array size != n*n");
  std::vector<double> l(n * n, 0.0);
  double logdet = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "Cholesky pivot " << j << " = " << d;
      throw Error(Errc::not_positive_definite, os.str());
    }
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    logdet += std::log(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return logdet;
}

double spd_logdet(const SymmetricMatrix& m) {
  const auto dense = m.to_dense();
  return spd_logdet(dense, m.size());
}

}  // namespace geok
