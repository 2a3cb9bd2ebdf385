#pragma once

// Independent reference computations for the tests: Eigen's dense symmetric
// eigensolver and closed forms worked out by hand.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "geok/numerics.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const geok::SymmetricMatrix& m) {
  const std::size_t n = m.size();
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, j);
  return a;
}

// Ascending.
inline std::vector<double> eigenvalues(const geok::SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double min_eigenvalue(const geok::SymmetricMatrix& m) { return eigenvalues(m).front(); }

inline geok::SymmetricMatrix random_symmetric(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  geok::SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, g(rng));
  return m;
}

// Smallest eigenvalue of the 4-point Gaussian circulant on the unit circle:
// row (1, u, u^4, u) with u = exp(-lambda pi^2 / 4).
inline double circulant4_min(double lambda) {
  const double u = std::exp(-lambda * M_PI * M_PI / 4.0);
  return (1.0 - u) * (1.0 - u - u * u - u * u * u);
}

}  // namespace oracle
