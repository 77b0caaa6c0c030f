#pragma once

#include <map>
#include <string>

#include "mqfactor/spinops.hpp"

namespace mqf {

// Coherence order of an S-register matrix entry |sa><sb| under the labelling
// field: p = popcount(sb) - popcount(sa).  With S_kz|0> = +1/2|0> the entry
// then rotates as exp(-i p omega_s t1) during the labelling period.
int coherence_order(i64 sa, i64 sb);

// Per-order squared Frobenius weight of a state, scaled by 1/eps_i.
// intensity[p + n] is the p-quantum power; orders span [-n, n].
struct CoherenceSpectrum {
  int n = 0;
  std::vector<double> intensity;
  double at(int p) const { return intensity.at(static_cast<size_t>(p + n)); }
  double total() const;
};

CoherenceSpectrum order_intensities(const StructuredState& state,
                                    ExecMode mode = ExecMode::Parallel);

// 1/eps_i * Tr(rho^+ rho), the conserved overall power.
double total_intensity(const StructuredState& state);

// Power in entries with sa != sb only: the coherent (multiple-quantum)
// content, which is what the closed-form intensity counts.
double offdiag_power(const StructuredState& state, ExecMode mode = ExecMode::Parallel);
double offdiag_power_serial(const StructuredState& state);

// Split a dense matrix into its sigma_p pieces by S-register order; rows and
// columns are blocks of L.  The pieces sum back to M and are orthogonal
// under the trace inner product.
std::map<int, Mat> decompose_orders(const Mat& M, i64 L);

// Emulated detection: labelling precession for t1, time-reversal readout,
// then observation of the transverse I magnetization, sampled on a K-point
// grid with t1 step 2*pi / (omega_s * K) and discrete Fourier transformed.
// Plain readout suits rho(m); the antisymmetric pair averages the two
// phase-inverted experiments that isolate rho_y(m).
enum class ReadoutKind { Plain, AntisymmetricPair };

struct SignalResult {
  std::vector<double> t1;
  std::vector<cplx> series;                // Tr{F rho_f} per sample
  CoherenceSpectrum peaks;                 // |DFT| at bins p in [-n, n]
  double offpeak_max = 0;                  // largest |DFT| at any other bin
  double omega_s = 1.0;
  std::vector<std::string> experiments;    // the physical runs this combines
};

// Throws GridTooCoarse when K < 2 * (2n + 1).
SignalResult synthesize_signal(const StructuredState& state, i64 y, i64 m,
                               ReadoutKind kind, double omega_s, int K);

// Transition counts of an n-spin register grouped by weight change p.
// z[0] counts unordered same-weight pairs; z[p >= 1] counts pairs p apart.
// stirling[p] is the Gaussian large-n form of the underlying binomial.
struct TransitionCensus {
  int n = 0;
  std::vector<i64> z;
  std::vector<double> stirling;
};

TransitionCensus transition_census(int n);
i64 binomial_i64(i64 a, i64 b);

// exp(i theta I_z) over ni I spins expanded in the diagonal product basis
// F_0 = E, F_1 = I_z, F_p = 2^(p-1) sum of p-fold I_kz products.
// Returns the ni+1 coefficients; supported to ni = 4.
std::vector<cplx> lomso_expand(double theta, int ni);

// Eigenvalue of F_p on any basis state of weight w (helper, used in tests).
double lomso_basis_eigenvalue(int p, int w, int ni);

}  // namespace mqf
