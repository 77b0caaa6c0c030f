#include "mqfactor/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace mqf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int popcount64(i64 v) { return std::popcount(static_cast<unsigned long long>(v)); }

}  // namespace

Mat hamiltonian_from_orbits(const OrbitTable& table) {
  const i64 L = table.mod.L;
  Mat H = Mat::Zero(L, L);
  for (const Orbit& orbit : table.orbits) {
    const i64 rx = orbit.period;
    Eigen::VectorXcd psi(rx);
    for (i64 s = 0; s < rx; ++s) {
      const double lambda = kTwoPi * double(s) / double(rx);
      for (i64 k = 0; k < rx; ++k)
        psi(k) = std::polar(1.0 / std::sqrt(double(rx)), kTwoPi * double(s) * double(k) / double(rx));
      for (i64 k = 0; k < rx; ++k)
        for (i64 kp = 0; kp < rx; ++kp)
          H(orbit.cycle[static_cast<size_t>(k)], orbit.cycle[static_cast<size_t>(kp)]) +=
              lambda * psi(k) * std::conj(psi(kp));
    }
  }
  return H;
}

Mat hamiltonian_cayley(const OrbitTable& table) {
  const i64 L = table.mod.L;
  Mat H = Mat::Zero(L, L);
  for (const Orbit& orbit : table.orbits) {
    const i64 rx = orbit.period;
    for (i64 j = 0; j < rx; ++j) {
      cplx alpha = 0;
      for (i64 l = 0; l < rx; ++l)
        alpha += kTwoPi * double(l) / double(rx * rx) *
                 std::polar(1.0, kTwoPi * double(j) * double(l) / double(rx));
      // j drive steps move |x y^k> to |x y^(k+j)>
      for (i64 k = 0; k < rx; ++k)
        H(orbit.cycle[static_cast<size_t>((k + j) % rx)], orbit.cycle[static_cast<size_t>(k)]) += alpha;
    }
  }
  return H;
}

Mat drive_matrix(const OrbitTable& table) {
  const i64 L = table.mod.L;
  Mat U = Mat::Zero(L, L);
  for (const Orbit& orbit : table.orbits) {
    const i64 rx = orbit.period;
    for (i64 k = 0; k < rx; ++k)
      U(orbit.cycle[static_cast<size_t>((k + 1) % rx)], orbit.cycle[static_cast<size_t>(k)]) = 1.0;
  }
  for (i64 x = table.mod.N; x < L; ++x) U(x, x) = 1.0;
  return U;
}

EigenSystem eigensystem(const OrbitTable& table) {
  const i64 L = table.mod.L;
  EigenSystem sys;
  sys.pairs.reserve(static_cast<size_t>(table.mod.N));
  for (size_t l = 0; l < table.orbits.size(); ++l) {
    const Orbit& orbit = table.orbits[l];
    const i64 rx = orbit.period;
    for (i64 s = 0; s < rx; ++s) {
      EigenPair pair;
      pair.orbit = static_cast<i64>(l);
      pair.s = s;
      pair.lambda = kTwoPi * double(s) / double(rx);
      pair.unit_eigenvalue = std::polar(1.0, -pair.lambda);
      pair.vec = Eigen::VectorXcd::Zero(L);
      for (i64 k = 0; k < rx; ++k)
        pair.vec(orbit.cycle[static_cast<size_t>(k)]) =
            std::polar(1.0 / std::sqrt(double(rx)), kTwoPi * double(s) * double(k) / double(rx));
      sys.pairs.push_back(std::move(pair));
    }
  }
  return sys;
}

SplitHamiltonian split_hamiltonian(const Mat& H) {
  if (H.rows() != H.cols())
    throw PreconditionError("DimensionMismatch", "split needs a square matrix");
  SplitHamiltonian s;
  s.h = H;
  s.h0 = Mat::Zero(H.rows(), H.cols());
  s.h1 = Mat::Zero(H.rows(), H.cols());
  for (i64 a = 0; a < H.rows(); ++a)
    for (i64 b = 0; b < H.cols(); ++b)
      (popcount64(a) == popcount64(b) ? s.h0 : s.h1)(a, b) = H(a, b);
  return s;
}

FrameSeriesResult interaction_frame_series(const Mat& rho0, const SplitHamiltonian& split,
                                           const OrbitTable& table, i64 m, int order) {
  const i64 L = table.mod.L;
  if (rho0.rows() != L || rho0.cols() != L)
    throw PreconditionError("DimensionMismatch", "state must be L x L on the S register");
  if (order < 1 || order > 2)
    throw PreconditionError("Precondition", "truncation order must be 1 or 2");
  if (std::abs(m) > table.r)
    throw PreconditionError("Precondition", "|m| must stay within one period of the drive");

  // exact evolution: permutation conjugation
  ModExpPropagator prop = make_propagator(table.mod, table.y, m);
  Mat exact(L, L);
  for (i64 j = 0; j < L; ++j)
    for (i64 i = 0; i < L; ++i)
      exact(prop.map[static_cast<size_t>(i)], prop.map[static_cast<size_t>(j)]) = rho0(i, j);

  // frame rotation from the weight-preserving part
  Eigen::SelfAdjointEigenSolver<Mat> es(split.h0);
  const double t = double(m);
  Eigen::VectorXcd phase(L), phase_inv(L);
  for (i64 k = 0; k < L; ++k) {
    phase(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
    phase_inv(k) = std::polar(1.0, es.eigenvalues()(k) * t);
  }
  const Mat u0 = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  const Mat u0inv = es.eigenvectors() * phase_inv.asDiagonal() * es.eigenvectors().adjoint();

  const Mat h1f = u0inv * split.h1 * u0;  // H1 seen from the rotating frame
  const cplx mit(0.0, -t);
  Mat body = rho0 + mit * (h1f * rho0 - rho0 * h1f);
  if (order >= 2) {
    const Mat inner = h1f * rho0 - rho0 * h1f;
    body += -0.5 * t * t * (h1f * inner - inner * h1f);
  }
  FrameSeriesResult res;
  res.approx = u0 * body * u0inv;
  res.residual = (res.approx - exact).norm();
  return res;
}

DiagonalizerResult approx_diagonalizer(const OrbitTable& table, const Mat* post_rotation) {
  const i64 L = table.mod.L;
  const i64 N = table.mod.N;
  constexpr double kNullTol = 1e-10;
  constexpr double kDropTol = 1e-8;

  DiagonalizerResult res;
  res.exact_expected = true;
  for (const Orbit& o : table.orbits)
    if (N % o.period != 0) res.exact_expected = false;

  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(static_cast<size_t>(N));
  auto try_accept = [&](Eigen::VectorXcd v) -> bool {
    if (v.norm() < kNullTol) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const Eigen::VectorXcd& q : basis) v -= q.dot(v) * q;
    if (v.norm() < kDropTol) return false;
    basis.push_back(v / v.norm());
    return true;
  };

  for (const Orbit& orbit : table.orbits) {
    for (i64 s = 0; s < N && i64(basis.size()) < N; ++s) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(L);
      for (i64 k = 0; k < N; ++k)
        v(orbit.cycle[static_cast<size_t>(k % orbit.period)]) +=
            std::polar(1.0 / std::sqrt(double(N)), kTwoPi * double(s) * double(k) / double(N));
      if (try_accept(std::move(v))) ++res.kept;
    }
  }
  // canonical completion if the candidates left gaps
  for (i64 j = 0; j < N && i64(basis.size()) < N; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(L);
    e(j) = 1.0;
    if (try_accept(std::move(e))) ++res.completed;
  }
  if (i64(basis.size()) != N)
    throw ComputationError("Internal", "candidate set failed to span the residue block");

  res.v = Mat::Zero(L, L);
  for (i64 c = 0; c < N; ++c) res.v.col(c) = basis[static_cast<size_t>(c)];
  for (i64 x = N; x < L; ++x) res.v(x, x) = 1.0;  // padding stays put

  if (post_rotation) {
    if (post_rotation->rows() != L || post_rotation->cols() != L)
      throw PreconditionError("DimensionMismatch", "post rotation must be L x L");
    res.v = res.v * (*post_rotation);
  }

  Mat d = res.v.adjoint() * drive_matrix(table) * res.v;
  d.diagonal().setZero();
  res.residual = d.norm();
  return res;
}

}  // namespace mqf
