#pragma once

// Brute-force references for the tests.  Everything here is built straight
// from definitions (dense matrices, explicit loops) and stays independent of
// the structured/permutation code paths it is used to check.

#include <bit>
#include <complex>
#include <Eigen/Dense>

#include "mqfactor/modarith.hpp"
#include "mqfactor/spinops.hpp"

namespace oracle {

using mqf::i64;

inline int popcount_i64(i64 v) { return std::popcount(static_cast<unsigned long long>(v)); }

// Dense joint conditional propagator: each I spin in |1> applies one copy of
// x -> x*y^m mod N to the S register; residues >= N and I spins in |0> idle.
inline Eigen::MatrixXcd joint_propagator(const mqf::SpinGeometry& geom, i64 y, i64 m) {
  const i64 L = geom.sdim();
  const i64 D = geom.dim();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(D, D);
  for (i64 ibits = 0; ibits < geom.idim(); ++ibits) {
    const i64 step = mqf::mod_pow(y, m * popcount_i64(ibits), geom.mod.N);
    for (i64 s = 0; s < L; ++s) {
      const i64 t = s < geom.mod.N ? s * step % geom.mod.N : s;
      U(ibits * L + t, ibits * L + s) = 1.0;
    }
  }
  return U;
}

// U rho U^+ by plain matrix products.
inline Eigen::MatrixXcd conjugate_dense(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& rho) {
  return U * rho * U.adjoint();
}

// Coherence-order bucket powers of a joint matrix read off entry by entry.
// Order of an entry is popcount(s_col) - popcount(s_row) on the S part.
inline std::vector<double> order_powers_dense(const Eigen::MatrixXcd& M, i64 L, int n) {
  std::vector<double> buckets(static_cast<size_t>(2 * n + 1), 0.0);
  for (i64 a = 0; a < M.rows(); ++a)
    for (i64 b = 0; b < M.cols(); ++b) {
      const int p = popcount_i64(b % L) - popcount_i64(a % L);
      buckets[static_cast<size_t>(p + n)] += std::norm(M(a, b));
    }
  return buckets;
}

// Count distinct basis-state pairs of an n-spin register by weight difference.
inline std::vector<i64> census_enumeration(int n) {
  const i64 dim = i64(1) << n;
  std::vector<i64> z(static_cast<size_t>(n + 1), 0);
  for (i64 a = 0; a < dim; ++a)
    for (i64 b = a + 1; b < dim; ++b)
      ++z[static_cast<size_t>(std::abs(popcount_i64(a) - popcount_i64(b)))];
  return z;
}

}  // namespace oracle
