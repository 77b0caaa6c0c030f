#include "mqfactor/mqspec.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace mqf {

namespace {

int popcount64(i64 v) { return std::popcount(static_cast<unsigned long long>(v)); }

// Merge a state into atomic words so every joint matrix entry is owned by
// exactly one (word, S-matrix) pair.
std::map<Word, Mat> merge_atomic(const StructuredState& state) {
  std::map<Word, Mat> merged;
  for (const Term& term : state.terms)
    for (const AtomicTerm& at : expand_atomic(term.label)) {
      auto [it, fresh] = merged.try_emplace(at.word, at.coeff * term.smat);
      if (!fresh) it->second += at.coeff * term.smat;
    }
  return merged;
}

struct BucketSums {
  std::vector<double> by_order;  // index p + n
  double sdiag = 0;              // power sitting on equal S indices
};

// Column partials folded in ascending column order: the summation order is
// fixed, so serial and parallel runs produce identical bits.
void add_matrix_buckets(BucketSums& acc, const Mat& A, int n, ExecMode mode) {
  const i64 L = A.cols();
  const int width = 2 * n + 2;  // per-order slots plus one diagonal slot
  std::vector<double> partial(static_cast<size_t>(L * width), 0.0);
#pragma omp parallel for schedule(static) if (mode == ExecMode::Parallel)
  for (i64 j = 0; j < L; ++j) {
    double* slot = partial.data() + j * width;
    const int pcj = popcount64(j);
    for (i64 i = 0; i < L; ++i) {
      const double w = std::norm(A(i, j));
      slot[pcj - popcount64(i) + n] += w;
      if (i == j) slot[width - 1] += w;
    }
  }
  for (i64 j = 0; j < L; ++j) {
    const double* slot = partial.data() + j * width;
    for (int b = 0; b < 2 * n + 1; ++b) acc.by_order[static_cast<size_t>(b)] += slot[b];
    acc.sdiag += slot[width - 1];
  }
}

BucketSums state_buckets(const StructuredState& state, ExecMode mode) {
  const int n = state.geom.mod.n;
  BucketSums acc;
  acc.by_order.assign(static_cast<size_t>(2 * n + 1), 0.0);
  for (const auto& [word, A] : merge_atomic(state)) add_matrix_buckets(acc, A, n, mode);
  return acc;
}

// Dense conditional propagator for the readout stage.
Mat joint_propagator_dense(const SpinGeometry& geom, i64 y, i64 m) {
  const i64 L = geom.sdim();
  Mat U = Mat::Zero(geom.dim(), geom.dim());
  for (i64 ibits = 0; ibits < geom.idim(); ++ibits) {
    ModExpPropagator p = make_propagator(geom.mod, y, m * popcount64(ibits));
    for (i64 s = 0; s < L; ++s) U(ibits * L + p.map[static_cast<size_t>(s)], ibits * L + s) = 1.0;
  }
  return U;
}

}  // namespace

int coherence_order(i64 sa, i64 sb) { return popcount64(sb) - popcount64(sa); }

double CoherenceSpectrum::total() const {
  double t = 0;
  for (double v : intensity) t += v;
  return t;
}

CoherenceSpectrum order_intensities(const StructuredState& state, ExecMode mode) {
  BucketSums acc = state_buckets(state, mode);
  CoherenceSpectrum spec;
  spec.n = state.geom.mod.n;
  spec.intensity = std::move(acc.by_order);
  for (double& v : spec.intensity) v /= state.geom.eps_i;
  return spec;
}

double total_intensity(const StructuredState& state) {
  BucketSums acc = state_buckets(state, ExecMode::Parallel);
  double t = 0;
  for (double v : acc.by_order) t += v;
  return t / state.geom.eps_i;
}

double offdiag_power(const StructuredState& state, ExecMode mode) {
  BucketSums acc = state_buckets(state, mode);
  double t = 0;
  for (double v : acc.by_order) t += v;
  return (t - acc.sdiag) / state.geom.eps_i;
}

double offdiag_power_serial(const StructuredState& state) {
  // independent reference: dense loops over merged words, same fold order
  const int n = state.geom.mod.n;
  double total = 0, sdiag = 0;
  for (const auto& [word, A] : merge_atomic(state)) {
    for (i64 j = 0; j < A.cols(); ++j)
      for (i64 i = 0; i < A.rows(); ++i) {
        const double w = std::norm(A(i, j));
        total += w;
        if (i == j) sdiag += w;
      }
  }
  return (total - sdiag) / state.geom.eps_i;
}

std::map<int, Mat> decompose_orders(const Mat& M, i64 L) {
  if (M.rows() != M.cols() || L < 1 || M.rows() % L != 0 || (L & (L - 1)) != 0)
    throw PreconditionError("DimensionMismatch", "matrix must be square with a power-of-two S block");
  std::map<int, Mat> parts;
  for (i64 a = 0; a < M.rows(); ++a)
    for (i64 b = 0; b < M.cols(); ++b) {
      if (M(a, b) == cplx(0.0, 0.0)) continue;
      const int p = coherence_order(a % L, b % L);
      auto [it, fresh] = parts.try_emplace(p, Mat::Zero(M.rows(), M.cols()));
      it->second(a, b) = M(a, b);
    }
  return parts;
}

SignalResult synthesize_signal(const StructuredState& state, i64 y, i64 m,
                               ReadoutKind kind, double omega_s, int K) {
  const SpinGeometry& geom = state.geom;
  const int n = geom.mod.n;
  const i64 L = geom.sdim();
  const i64 D = geom.dim();
  if (K < 2 * (2 * n + 1))
    throw PreconditionError("GridTooCoarse", "K = " + std::to_string(K) + " cannot resolve orders up to " +
                                                 std::to_string(n) + "; need K >= " + std::to_string(2 * (2 * n + 1)));
  if (!(omega_s > 0)) throw PreconditionError("Precondition", "omega_s must be positive");

  const Mat rho = assemble(state);

  // transverse I magnetization, the observed operator
  SpinGeometry unit = geom;
  unit.eps_i = 1.0;
  const Mat F = assemble(initial_state_uniform(unit));

  // readout propagators folded into the observable once
  const Mat Vinv = joint_propagator_dense(geom, y, -m);
  Mat G = Vinv.adjoint() * F * Vinv;
  SignalResult res;
  res.omega_s = omega_s;
  res.experiments = {"labelling precession + inverse-drive readout + transverse I detection"};
  if (kind == ReadoutKind::AntisymmetricPair) {
    // second run: 180x on the I register, then the forward drive; averaging
    // the two keeps only the response odd in m
    Mat inner = Vinv * F * Vinv.adjoint();  // U^{-m} F U^{+m}
    Mat G2(D, D);
    const i64 imask = geom.idim() - 1;
    for (i64 a = 0; a < D; ++a)
      for (i64 b = 0; b < D; ++b) {
        const i64 fa = ((~(a / L)) & imask) * L + a % L;
        const i64 fb = ((~(b / L)) & imask) * L + b % L;
        G2(a, b) = inner(fa, fb);
      }
    G = 0.5 * (G + G2);
    res.experiments.push_back("labelling precession + I-register 180x + forward-drive readout");
  }

  // entry orders once; then each sample is a phase-weighted overlap
  Eigen::MatrixXi orders(D, D);
  for (i64 a = 0; a < D; ++a)
    for (i64 b = 0; b < D; ++b) orders(a, b) = coherence_order(a % L, b % L);

  const double dt = 2.0 * std::numbers::pi / (omega_s * K);
  res.t1.resize(static_cast<size_t>(K));
  res.series.resize(static_cast<size_t>(K));
  for (int j = 0; j < K; ++j) {
    const double t = j * dt;
    cplx s = 0;
    for (i64 a = 0; a < D; ++a)
      for (i64 b = 0; b < D; ++b) {
        if (G(a, b) == cplx(0.0, 0.0) || rho(b, a) == cplx(0.0, 0.0)) continue;
        // rho_t(b, a) picks up exp(-i p(b,a) w t)
        const double ang = -omega_s * t * orders(b, a);
        s += G(a, b) * rho(b, a) * std::polar(1.0, ang);
      }
    res.t1[static_cast<size_t>(j)] = t;
    res.series[static_cast<size_t>(j)] = s;
  }

  // K-point DFT; order p lands in bin p mod K
  std::vector<double> mag(static_cast<size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    cplx acc = 0;
    for (int j = 0; j < K; ++j)
      acc += res.series[static_cast<size_t>(j)] *
             std::polar(1.0, 2.0 * std::numbers::pi * double(k) * double(j) / double(K));
    mag[static_cast<size_t>(k)] = std::abs(acc) / double(K);
  }
  res.peaks.n = n;
  res.peaks.intensity.assign(static_cast<size_t>(2 * n + 1), 0.0);
  std::vector<bool> is_peak_bin(static_cast<size_t>(K), false);
  for (int p = -n; p <= n; ++p) {
    const int bin = ((p % K) + K) % K;
    // the readout observable is eps-free while the state carries eps, so the
    // spectrum is already on the same 1/eps scale as order_intensities
    res.peaks.intensity[static_cast<size_t>(p + n)] = mag[static_cast<size_t>(bin)];
    is_peak_bin[static_cast<size_t>(bin)] = true;
  }
  for (int k = 0; k < K; ++k)
    if (!is_peak_bin[static_cast<size_t>(k)]) res.offpeak_max = std::max(res.offpeak_max, mag[static_cast<size_t>(k)]);
  return res;
}

i64 binomial_i64(i64 a, i64 b) {
  if (b < 0 || b > a) return 0;
  b = std::min(b, a - b);
  i64 acc = 1;
  for (i64 k = 1; k <= b; ++k) acc = acc * (a - b + k) / k;
  return acc;
}

TransitionCensus transition_census(int n) {
  if (n < 1) throw PreconditionError("Precondition", "census needs n >= 1");
  if (n > 30) throw PreconditionError("TooLarge", "census overflows past n = 30");
  TransitionCensus c;
  c.n = n;
  c.z.resize(static_cast<size_t>(n + 1));
  c.stirling.resize(static_cast<size_t>(n + 1));
  c.z[0] = (binomial_i64(2 * n, n) - (i64(1) << n)) / 2;
  for (int p = 1; p <= n; ++p) c.z[static_cast<size_t>(p)] = binomial_i64(2 * n, n - p);
  const double base = std::pow(4.0, n) / std::sqrt(std::numbers::pi * n);
  for (int p = 0; p <= n; ++p)
    c.stirling[static_cast<size_t>(p)] = base * std::exp(-double(p) * double(p) / double(n));
  return c;
}

double lomso_basis_eigenvalue(int p, int w, int ni) {
  if (p == 0) return 1.0;
  // 2^(p-1) * (1/2)^p * sum over how many of the p chosen spins are |1>
  double s = 0;
  for (int j = 0; j <= p; ++j) {
    const double term = double(binomial_i64(w, j)) * double(binomial_i64(ni - w, p - j));
    s += (j % 2 == 0) ? term : -term;
  }
  return 0.5 * s;
}

std::vector<cplx> lomso_expand(double theta, int ni) {
  if (ni < 1 || ni > 4)
    throw PreconditionError("UnsupportedNi", "diagonal expansion handled for 1 <= ni <= 4, got " +
                                                 std::to_string(ni));
  const int dim = ni + 1;
  Mat A(dim, dim);
  Eigen::VectorXcd rhs(dim);
  for (int w = 0; w < dim; ++w) {
    for (int p = 0; p < dim; ++p) A(w, p) = lomso_basis_eigenvalue(p, w, ni);
    rhs(w) = std::polar(1.0, theta * 0.5 * double(ni - 2 * w));
  }
  Eigen::VectorXcd alpha = A.colPivHouseholderQr().solve(rhs);
  return {alpha.data(), alpha.data() + dim};
}

}  // namespace mqf
