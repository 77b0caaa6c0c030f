// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances are pinned here on purpose; loosening them is not a fix.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mqfactor/factordrive.hpp"
#include "mqfactor/hamiltonian.hpp"
#include "oracles.hpp"

using namespace mqf;

namespace {

constexpr i64 kSuite[] = {15, 21, 33, 35};

std::vector<i64> coprime_ys(i64 N) {
  std::vector<i64> ys;
  for (i64 y = 1; y < N; ++y)
    if (gcd_i64(y, N) == 1) ys.push_back(y);
  return ys;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// |a - b| relative to the larger magnitude, floored at 1 so exact zeros
// compare absolutely.
double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome closed_form_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  int pairs = 0;
  for (i64 N : kSuite) {
    SpinGeometry geom = SpinGeometry::make(Modulus::make(N), 1, 1.0);
    StructuredState base = initial_state_uniform(geom);
    for (i64 y : coprime_ys(N)) {
      OrbitTable table = orbit_decompose(y, N);
      ++pairs;
      for (i64 m = 0; m <= 2 * table.r; ++m) {
        const double direct_I = offdiag_power(evolve(base, y, m));
        const double direct_Iy = total_intensity(antisymmetric_part(base, y, m));
        worst = std::max(worst, rel_err(direct_I, closed_form_intensity(table, geom, m)));
        worst = std::max(worst, rel_err(direct_Iy, closed_form_intensity_y(table, geom, m)));
      }
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-9 && dt <= 60.0,
          fmt("max rel error %.3g over %d (N,y) pairs in %.1f s (limits 1e-9, 60 s)", worst,
              pairs, dt)};
}

Outcome zero_point_law() {
  for (i64 N : kSuite) {
    SpinGeometry geom = SpinGeometry::make(Modulus::make(N), 1, 1.0);
    for (i64 y : coprime_ys(N)) {
      const i64 r = multiplicative_order(y, N);  // brute-force oracle
      const i64 stride = r % 2 == 0 ? r / 2 : r;
      ZeroPoints zeros = find_zero_points(scan_intensity(geom, y, 0, 2 * r), 1e-9);
      std::vector<i64> lattice;
      for (i64 m = 0; m <= 2 * r; m += stride) lattice.push_back(m);
      if (zeros.points != lattice || (r > 1 && zeros.r_prime != stride))
        return {false, fmt("mismatch at N=%lld y=%lld", (long long)N, (long long)y)};
    }
  }
  return {true, "zero sets equal the r/2 (even r) or r (odd r) lattice for the whole suite"};
}

Outcome intensity_bounds() {
  double worst_margin = 1e300;
  for (i64 N : kSuite) {
    Modulus mod = Modulus::make(N);
    SpinGeometry geom = SpinGeometry::make(mod, 1, 1.0);
    const double floor_abs =
        0.125 * geom.ni * double(geom.idim()) * geom.eps_i * double(N - (mod.p + mod.q - 1));
    const double transverse_ref =
        0.25 * geom.ni * geom.eps_i * double(i64(1) << (mod.n + geom.ni));
    const double floor_ratio = 0.5 * double(N - (mod.p + mod.q - 1)) / double(mod.L);
    for (i64 y : coprime_ys(N)) {
      OrbitTable table = orbit_decompose(y, N);
      if (table.degenerate) continue;  // no nonzero points exist
      const i64 stride = table.r % 2 == 0 ? table.r / 2 : table.r;
      ScanResult scan = scan_intensity(geom, y, 0, 2 * table.r);
      for (const ScanPoint& pt : scan.points) {
        if (pt.m % stride == 0) continue;
        worst_margin = std::min(worst_margin, pt.Iy_direct - floor_abs);
        if (pt.Iy_direct < floor_abs - 1e-12 ||
            pt.Iy_direct / transverse_ref < floor_ratio - 1e-12)
          return {false, fmt("bound violated at N=%lld y=%lld m=%lld", (long long)N,
                             (long long)y, (long long)pt.m)};
      }
    }
  }
  // pinned instance: the odd-m response of the smallest semiprime
  SpinGeometry g15 = SpinGeometry::make(Modulus::make(15), 1, 1.0);
  StructuredState base = initial_state_uniform(g15);
  const double odd = total_intensity(antisymmetric_part(base, 2, 1));
  const double ratio = odd / (0.25 * 1 * 1.0 * 32);
  if (std::abs(odd - 3.0) > 1e-12 || ratio < 0.25)
    return {false, fmt("instance check failed: Iy=%.15g ratio=%.15g", odd, ratio)};
  return {true, fmt("floors hold suite-wide (tightest slack %.3g); instance Iy=3eps, ratio 3/8",
                    worst_margin)};
}

Outcome power_invariance() {
  double worst = 0;
  for (i64 N : kSuite) {
    SpinGeometry geom = SpinGeometry::make(Modulus::make(N), 1, 1.0);
    StructuredState base = initial_state_uniform(geom);
    const double p0 = total_intensity(base);
    std::mt19937_64 rng(20260817u + std::uint64_t(N));
    std::uniform_int_distribution<i64> draw_y(1, N - 1);
    std::uniform_int_distribution<i64> draw_m(-50, 50);
    for (int k = 0; k < 50; ++k) {
      i64 y = draw_y(rng);
      while (gcd_i64(y, N) != 1) y = draw_y(rng);
      const double p = total_intensity(evolve(base, y, draw_m(rng)));
      worst = std::max(worst, std::abs(p - p0) / p0);
    }
  }
  return {worst <= 1e-12, fmt("max relative drift %.3g over 50 draws per N (limit 1e-12)", worst)};
}

Outcome census_floor() {
  for (i64 N : kSuite) {
    Modulus mod = Modulus::make(N);
    for (i64 y : coprime_ys(N)) {
      OrbitCensus census = parker_plenio_check(orbit_decompose(y, N), mod.p, mod.q);
      if (!census.pass)
        return {false, fmt("floor failed at N=%lld y=%lld", (long long)N, (long long)y)};
    }
  }
  OrbitCensus c15 = parker_plenio_check(orbit_decompose(2, 15), 3, 5);
  if (c15.count != 12 || c15.bound != 8 || c15.deficit != 3 || c15.deficit_bound != 7)
    return {false, "pinned N=15 y=2 census values drifted"};
  return {true, "count >= (p-1)(q-1) and deficit <= p+q-1 suite-wide; N=15: 12 >= 8, 3 <= 7"};
}

Outcome generator_consistency() {
  double worst_herm = 0, worst_route = 0, worst_exp = 0;
  for (i64 N : kSuite)
    for (i64 y : coprime_ys(N)) {
      OrbitTable table = orbit_decompose(y, N);
      Mat H = hamiltonian_from_orbits(table);
      worst_herm = std::max(worst_herm, (H - H.adjoint()).cwiseAbs().maxCoeff());
      worst_route = std::max(worst_route, (H - hamiltonian_cayley(table)).cwiseAbs().maxCoeff());
      Mat expm = (cplx(0.0, -1.0) * H).exp();
      worst_exp = std::max(worst_exp, (expm - drive_matrix(table)).cwiseAbs().maxCoeff());
    }
  return {worst_herm <= 1e-12 && worst_route <= 1e-9 && worst_exp <= 1e-9,
          fmt("hermiticity %.3g (<=1e-12), route gap %.3g, exp gap %.3g (<=1e-9)", worst_herm,
              worst_route, worst_exp)};
}

Outcome census_formulas() {
  for (int n = 1; n <= 6; ++n) {
    TransitionCensus census = transition_census(n);
    std::vector<i64> direct = oracle::census_enumeration(n);
    for (int p = 0; p <= n; ++p)
      if (census.z[size_t(p)] != direct[size_t(p)])
        return {false, fmt("exact census mismatch at n=%d p=%d", n, p)};
  }
  TransitionCensus c6 = transition_census(6);
  double worst = 0;
  for (int p = 0; p <= 2; ++p) {
    const double exact = double(binomial_i64(12, 6 - p));
    worst = std::max(worst, std::abs(c6.stirling[size_t(p)] - exact) / exact);
  }
  return {worst <= 0.10,
          fmt("exact for n<=6; Gaussian form off by %.2f%% at n=6, |p|<=2 (limit 10%%)",
              100 * worst)};
}

Outcome readout_equivalence() {
  SpinGeometry geom = SpinGeometry::make(Modulus::make(15), 1, 1.0);
  StructuredState base = initial_state_uniform(geom);
  const int K = 4 * (2 * geom.mod.n + 1);
  double worst = 0;
  for (i64 m : {i64(1), i64(3)}) {
    StructuredState rho = evolve(base, 2, m);
    CoherenceSpectrum direct = order_intensities(rho);
    SignalResult sig = synthesize_signal(rho, 2, m, ReadoutKind::Plain, 1.0, K);
    StructuredState rho_y = antisymmetric_part(base, 2, m);
    CoherenceSpectrum direct_y = order_intensities(rho_y);
    SignalResult sig_y = synthesize_signal(rho_y, 2, m, ReadoutKind::AntisymmetricPair, 1.0, K);
    for (int p = -geom.mod.n; p <= geom.mod.n; ++p) {
      worst = std::max(worst, std::abs(sig.peaks.at(p) - direct.at(p)));
      worst = std::max(worst, std::abs(sig_y.peaks.at(p) - direct_y.at(p)));
    }
  }
  // the odd response one step from a zero point is purely zero-quantum
  CoherenceSpectrum line = order_intensities(antisymmetric_part(base, 2, 1));
  bool pure = std::abs(line.at(0) - 3.0) <= 1e-9;
  for (int p = -geom.mod.n; p <= geom.mod.n; ++p)
    if (p != 0) pure = pure && line.at(p) <= 1e-9;
  // polarization scales the line height linearly
  SpinGeometry half = SpinGeometry::make(Modulus::make(15), 1, 0.5);
  const double scaled = order_intensities(antisymmetric_part(initial_state_uniform(half), 2, 1)).at(0);
  pure = pure && std::abs(scaled - 1.5) <= 1e-9;
  return {worst <= 1e-9 && pure,
          fmt("detected peaks match buckets to %.3g (limit 1e-9); odd response all in order 0",
              worst)};
}

Outcome diagonalizer_cases() {
  DiagonalizerResult exact = approx_diagonalizer(orbit_decompose(4, 21));
  DiagonalizerResult rough = approx_diagonalizer(orbit_decompose(2, 15));
  const double frozen = 2.67748210600752;  // regression value
  const bool pass = exact.exact_expected && exact.residual <= 1e-9 && rough.residual > 0 &&
                    std::abs(rough.residual - frozen) <= 1e-6 * frozen;
  return {pass, fmt("exact case residual %.3g (<=1e-9); approximate case residual %.14g "
                    "(regression %.14g)",
                    exact.residual, rough.residual, frozen)};
}

Outcome end_to_end_factoring() {
#ifdef _OPENMP
  const int saved_threads = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  struct Want {
    i64 N, f1, f2;
  };
  const Want wants[] = {{15, 3, 5}, {21, 3, 7}, {33, 3, 11}, {35, 5, 7}};
  double slowest = 0;
  bool ok = true;
  std::string fail;
  FactorResult r33;
  for (const Want& want : wants) {
    const auto t0 = std::chrono::steady_clock::now();
    FactorResult res = factor(want.N);
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    if (want.N == 33) r33 = res;
    if (!res.ok || res.f1 != want.f1 || res.f2 != want.f2 || dt >= 5.0) {
      ok = false;
      fail = fmt("N=%lld gave (%lld,%lld) in %.2f s", (long long)want.N, (long long)res.f1,
                 (long long)res.f2, dt);
      break;
    }
  }
#ifdef _OPENMP
  omp_set_num_threads(saved_threads);
#endif
  // the f = -1 retry: y = N-1 always has order 2 and lands on f = N-1;
  // the N=33 run retries past y=2 for the same reason
  const bool retried = classical_postprocess(1, 14, 15).status == "retry_new_y" &&
                       r33.y_trace.size() >= 2 && r33.y_trace.front() == 2;
  if (!ok) return {false, fail};
  return {retried, fmt("all four semiprimes factored, slowest %.2f s (< 5 s); retry path hit "
                       "(N=33 tried %zu bases)",
                       slowest, r33.y_trace.size())};
}

Outcome antisymmetry_and_diagonal() {
  double worst = 0;
  for (i64 N : kSuite) {
    SpinGeometry geom = SpinGeometry::make(Modulus::make(N), 1, 1.0);
    StructuredState base = initial_state_uniform(geom);
    const i64 L = geom.sdim();
    for (i64 y : coprime_ys(N)) {
      const i64 r = multiplicative_order(y, N);
      const i64 stride = r % 2 == 0 ? r / 2 : r;
      std::mt19937_64 rng(20260817u ^ (std::uint64_t(N) << 8) ^ std::uint64_t(y));
      std::uniform_int_distribution<i64> draw_k(0, 6);
      std::uniform_int_distribution<i64> draw_m(0, 2 * r);
      for (int it = 0; it < 20; ++it) {
        const i64 pivot = draw_k(rng) * stride;
        const i64 m = draw_m(rng);
        Mat plus = assemble(antisymmetric_part(base, y, pivot + m));
        Mat minus = assemble(antisymmetric_part(base, y, pivot - m));
        worst = std::max(worst, (plus + minus).cwiseAbs().maxCoeff());
        for (i64 a = 0; a < geom.idim(); ++a)
          for (i64 b = 0; b < geom.idim(); ++b)
            for (i64 s = 0; s < L; ++s)
              if (plus(a * L + s, b * L + s) != cplx(0.0, 0.0))
                return {false, fmt("nonzero S-diagonal at N=%lld y=%lld m=%lld",
                                   (long long)N, (long long)y, (long long)(pivot + m))};
      }
    }
  }
  return {worst <= 1e-12,
          fmt("mirror antisymmetry to %.3g (limit 1e-12); S-diagonal exactly zero", worst)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"closed-form intensities reproduce direct evolution", closed_form_reproduction},
      {"zero points sit exactly on the period lattice", zero_point_law},
      {"nonzero intensities clear the census floor and visibility ratio", intensity_bounds},
      {"total power invariant under the drive", power_invariance},
      {"full-period residue count clears the census floor", census_floor},
      {"drive generator consistent across routes and exponentiation", generator_consistency},
      {"transition census exact, Gaussian form within 10%", census_formulas},
      {"detected spectra equal bucket intensities", readout_equivalence},
      {"whole-range Fourier basis: exact and recorded-residual cases", diagonalizer_cases},
      {"end-to-end factoring with retry path", end_to_end_factoring},
      {"odd-response antisymmetry and exact zero diagonal", antisymmetry_and_diagonal},
  };

  int failures = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2d. %s — %s\n", outcome.pass ? "PASS" : "FAIL", id, name,
                outcome.detail.c_str());
  }
  std::printf("acceptance: %d/11 criteria passed\n", 11 - failures);
  return failures;
}
