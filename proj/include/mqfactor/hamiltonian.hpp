#pragma once

#include "mqfactor/spinops.hpp"

namespace mqf {

// Effective generator of the drive on the S register: block diagonal over
// orbits, zero on the padding residues [N, L), with per-orbit spectrum
// lambda_s = 2*pi*s / period, s = 0..period-1 (a full turn, not the
// principal branch).  exp(-iH) reproduces one drive step exactly.

// Synthesis from the spectral data: sum of lambda |psi><psi| over every
// orbit's Fourier modes.
Mat hamiltonian_from_orbits(const OrbitTable& table);

// Independent route: per-orbit polynomial in the drive with coefficients
// alpha_j = sum_l (2*pi*l / period^2) exp(i 2*pi*j*l / period).
Mat hamiltonian_cayley(const OrbitTable& table);

// Dense one-step drive permutation on [0, L): orbit shifts plus identity
// padding.  The matrix exp(-iH) is checked against.
Mat drive_matrix(const OrbitTable& table);

struct EigenPair {
  i64 orbit = 0;    // index into table.orbits
  i64 s = 0;        // Fourier mode inside the orbit
  double lambda = 0;  // in [0, 2*pi)
  cplx unit_eigenvalue;  // exp(-i lambda), the drive eigenvalue
  Eigen::VectorXcd vec;  // length L, supported on the orbit
};

// All N eigenpairs, grouped by orbit (ascending rep), modes ascending.
struct EigenSystem {
  std::vector<EigenPair> pairs;
};

EigenSystem eigensystem(const OrbitTable& table);

// H = H0 + H1 split by coherence order: H0 keeps the weight-preserving
// entries (popcount(row) = popcount(col)), H1 the rest.
struct SplitHamiltonian {
  Mat h, h0, h1;
};

SplitHamiltonian split_hamiltonian(const Mat& H);

// Interaction-frame expansion around H0 truncated at first or second order
// in the commutator series, evaluated at integer time m and compared with
// the exact permutation conjugation.  Diagnostic only.
struct FrameSeriesResult {
  Mat approx;
  double residual = 0;  // Frobenius distance to the exact evolution
};

FrameSeriesResult interaction_frame_series(const Mat& rho0, const SplitHamiltonian& split,
                                           const OrbitTable& table, i64 m, int order);

// Fourier columns built over the whole range N instead of each orbit's
// period: exact when every period divides N, an approximation otherwise.
// Candidates are walked in ascending (orbit, mode) order; null columns are
// dropped, survivors orthonormalized by stable Gram-Schmidt, the basis is
// completed canonically, and padding residues keep identity columns.
struct DiagonalizerResult {
  Mat v;                    // L x L unitary
  double residual = 0;      // off-diagonal mass of v^+ U v
  bool exact_expected = false;  // every period divides N
  i64 kept = 0;             // candidates surviving the orthonormalization
  i64 completed = 0;        // canonical fill-ins needed on [0, N)
};

// post_rotation, when given, right-multiplies the finished basis (hook for
// refined constructions); it must be L x L.
DiagonalizerResult approx_diagonalizer(const OrbitTable& table, const Mat* post_rotation = nullptr);

}  // namespace mqf
