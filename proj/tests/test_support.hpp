// Shared helpers for the unit tests: seeded random inputs and an Eigen
// bridge used as an independent eigensolver.
#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "spinwitness/linalg.hpp"

namespace testing_support {

using spinwitness::ComplexMatrix;
using spinwitness::cplx;

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) m(i, k) = cplx{g(rng), g(rng)};
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t d) {
  return random_matrix(rng, d).hermitian_part();
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t k = 0; k < m.dim(); ++k) e(i, k) = m(i, k);
  return e;
}

/// Ascending eigenvalues from Eigen's self-adjoint solver.
inline std::vector<double> oracle_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

}  // namespace testing_support
