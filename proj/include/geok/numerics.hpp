#pragma once

// Dense symmetric spectra, symmetric circulants, PSD verdicts and Weyl-type
// perturbation certificates.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace geok {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Absolute threshold below which a smallest eigenvalue counts as a genuine
/// refutation of positive semi-definiteness rather than rounding.
inline constexpr double kWitnessThreshold = -1e-6;

/// Real symmetric matrix in packed upper-triangle storage, so that
/// `(i, j)` and `(j, i)` address the same entry.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n, double fill = 0.0);

  static SymmetricMatrix identity(std::size_t n);
  /// Reads the upper triangle of a row-major n*n array.
  static SymmetricMatrix from_dense(std::size_t n, std::span<const double> row_major);

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double value) noexcept { data_[index(i, j)] = value; }

  double trace() const noexcept;
  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  std::vector<double> to_dense() const;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_;
  std::vector<double> data_;
};

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  int iterations = 0;               // Jacobi sweeps, 0 for closed-form routes
  double off_diag_residual = 0.0;   // max |off-diagonal| / ||m||_F at exit

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

struct Eigensystem {
  Spectrum spectrum;
  std::vector<double> vectors;  // row-major n*n, column k pairs with eigenvalue k
};

struct JacobiOptions {
  double tol = 1e-12;          // relative to ||m||_F
  int max_sweeps = 50;
  std::size_t max_size = 8192;
};

/// Cyclic Jacobi rotations. Throws Errc::non_convergence when the relative
/// off-diagonal residual is still above `tol` after `max_sweeps`.
Spectrum jacobi_eigenvalues(const SymmetricMatrix& m, const JacobiOptions& opts = {});
Eigensystem jacobi_eigensystem(const SymmetricMatrix& m, const JacobiOptions& opts = {});

/// min(|m| mod n, n - |m| mod n)
std::size_t circmin(long long m, std::size_t n) noexcept;

/// First row of the symmetric circulant with entries
/// exp(-lambda_eff * ((2*pi/n) * circmin(j))^q).
std::vector<double> circulant_kernel_row(std::size_t n, double lambda_eff, double q = 2.0);
SymmetricMatrix circulant_gaussian_matrix(std::size_t n, double lambda_eff);
SymmetricMatrix circulant_from_row(std::span<const double> first_row);

/// Eigenvalues of the symmetric circulant with the given first row, by
/// direct cosine sums. Throws Errc::asymmetric_row if c_j != c_{n-j}.
Spectrum circulant_spectrum(std::span<const double> first_row);
/// Smallest circulant eigenvalue only (half the work of the full spectrum).
double circulant_min_eigenvalue(std::span<const double> first_row);

struct PsdVerdict {
  bool psd = false;
  double lambda_min = 0.0;
  double tolerance = 0.0;
};

/// Default tolerance 1e-10 * n * max|entry|.
double default_psd_tolerance(const SymmetricMatrix& m) noexcept;
PsdVerdict psd_check(const SymmetricMatrix& m);
PsdVerdict psd_check(const SymmetricMatrix& m, double tol);

struct PerturbationCertificate {
  double lambda_min_reference = 0.0;
  double inf_norm_delta = 0.0;
  std::size_t n = 0;
  double certified_bound = 0.0;
  bool fires = false;
};

/// Upper bound on the smallest eigenvalue of any matrix within entrywise
/// distance `inf_norm_delta` of the reference: lambda_min + n * delta.
PerturbationCertificate weyl_certify(const Spectrum& reference, double inf_norm_delta,
                                     std::size_t n);

/// max_ij |a_ij - b_ij|
double inf_norm_diff(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// log det via Cholesky; throws Errc::not_positive_definite on a pivot <= 0.
double spd_logdet(const SymmetricMatrix& m);
/// Same, for a row-major dense n*n array (symmetric part is read from the
/// lower triangle).
double spd_logdet(std::span<const double> row_major, std::size_t n);

}  // namespace geok
