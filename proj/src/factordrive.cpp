#include "mqfactor/factordrive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

namespace mqf {

namespace {

double intensity_prefactor(const SpinGeometry& geom) {
  return 0.25 * double(geom.ni) * double(geom.idim()) * geom.eps_i;
}

// Sum of orbit periods r_x with r_x | m; every period divides m = 0.
i64 expired_period_sum(const OrbitTable& table, i64 m) {
  const i64 am = std::llabs(m);
  i64 sum = 0;
  for (const Orbit& orbit : table.orbits)
    if (am % orbit.period == 0) sum += orbit.period;
  return sum;
}

ScanPoint eval_scan_point(const SpinGeometry& geom, const OrbitTable& table, i64 y, i64 m,
                          ExecMode inner) {
  StructuredState base = initial_state_uniform(geom);
  StructuredState rho = evolve(base, y, m, inner);
  StructuredState rho_y = antisymmetric_part(base, y, m, inner);
  ScanPoint pt;
  pt.m = m;
  pt.I_direct = offdiag_power(rho, inner);
  pt.Iy_direct = total_intensity(rho_y);
  pt.orders = order_intensities(rho_y, inner);
  pt.I_closed = closed_form_intensity(table, geom, m);
  pt.Iy_closed = closed_form_intensity_y(table, geom, m);
  return pt;
}

ScanResult scan_range(const SpinGeometry& geom, i64 y, i64 m_lo, i64 m_hi, ScanMode window,
                      ExecMode mode) {
  OrbitTable table = orbit_decompose(y, geom.mod.N);
  ScanResult res;
  res.N = geom.mod.N;
  res.y = table.y;
  res.mode = window;
  const i64 count = m_hi < m_lo ? 0 : m_hi - m_lo + 1;
  res.points.resize(size_t(count));
  // Each point is self-contained; inner kernels stay serial so the parallel
  // schedule cannot change a single bit of the output.
#pragma omp parallel for schedule(dynamic) if (mode == ExecMode::Parallel)
  for (i64 k = 0; k < count; ++k)
    res.points[size_t(k)] = eval_scan_point(geom, table, y, m_lo + k, ExecMode::Serial);
  for (const ScanPoint& pt : res.points) {
    res.max_discrepancy = std::max(res.max_discrepancy, std::abs(pt.I_direct - pt.I_closed));
    res.max_discrepancy = std::max(res.max_discrepancy, std::abs(pt.Iy_direct - pt.Iy_closed));
  }
  return res;
}

bool is_prime_power(i64 N) {
  for (i64 p = 2; p * p <= N; ++p) {
    if (N % p != 0) continue;
    i64 rest = N;
    while (rest % p == 0) rest /= p;
    return rest == 1;
  }
  return false;  // N prime or 1; prime is caught separately
}

}  // namespace

double closed_form_intensity(const OrbitTable& table, const SpinGeometry& geom, i64 m) {
  return intensity_prefactor(geom) * double(table.mod.N - expired_period_sum(table, m));
}

double closed_form_intensity_y(const OrbitTable& table, const SpinGeometry& geom, i64 m) {
  return 0.5 * intensity_prefactor(geom) * double(table.mod.N - expired_period_sum(table, 2 * m));
}

ScanResult scan_intensity(const SpinGeometry& geom, i64 y, i64 m_lo, i64 m_hi, ExecMode mode) {
  return scan_range(geom, y, m_lo, m_hi, ScanMode::Exhaustive, mode);
}

ScanResult scan_intensity_serial(const SpinGeometry& geom, i64 y, i64 m_lo, i64 m_hi) {
  OrbitTable table = orbit_decompose(y, geom.mod.N);
  ScanResult res;
  res.N = geom.mod.N;
  res.y = table.y;
  res.mode = ScanMode::Exhaustive;
  for (i64 m = m_lo; m <= m_hi; ++m)
    res.points.push_back(eval_scan_point(geom, table, y, m, ExecMode::Serial));
  for (const ScanPoint& pt : res.points) {
    res.max_discrepancy = std::max(res.max_discrepancy, std::abs(pt.I_direct - pt.I_closed));
    res.max_discrepancy = std::max(res.max_discrepancy, std::abs(pt.Iy_direct - pt.Iy_closed));
  }
  return res;
}

ScanResult scan_window(const SpinGeometry& geom, i64 y, i64 center, i64 halfwidth,
                       ExecMode mode) {
  if (halfwidth < 0) throw PreconditionError("BadRange", "window halfwidth must be >= 0");
  return scan_range(geom, y, std::max<i64>(0, center - halfwidth), center + halfwidth,
                    ScanMode::LocalWindow, mode);
}

ZeroPoints find_zero_points(const ScanResult& scan, double tol) {
  if (tol < 0) throw PreconditionError("BadTolerance", "tolerance must be >= 0");
  ZeroPoints z;
  for (const ScanPoint& pt : scan.points)
    if (pt.Iy_direct <= tol) z.points.push_back(pt.m);
  std::sort(z.points.begin(), z.points.end());
  for (i64 m : z.points)
    if (m > 0) {
      z.r_prime = m;
      break;
    }
  if (z.r_prime == 0)
    throw ComputationError("NoZeroFound",
                           "no positive zero point of Iy within the scanned range");
  return z;
}

FactorResult classical_postprocess(i64 r_prime, i64 y, i64 N) {
  if (N < 3) throw PreconditionError("TooSmall", "modulus must be at least 3");
  if (r_prime < 1) throw PreconditionError("BadPeriod", "zero-point estimate must be >= 1");
  y = mod_norm(y, N);
  if (gcd_i64(y, N) != 1) throw PreconditionError("NotCoprime", "y shares a factor with N");

  FactorResult res;
  res.N = N;
  res.y_trace = {y};
  res.r_prime = r_prime;
  res.status = "retry_new_y";

  i64 rp = r_prime;
  i64 f = mod_pow(y, rp, N);
  res.f_chain.push_back(f);
  while (f == 1) {
    if (rp % 2 != 0) return res;  // chain dead-ends at an odd exponent
    rp /= 2;
    f = mod_pow(y, rp, N);
    res.f_chain.push_back(f);
  }
  if (f == N - 1) return res;  // f = -1 carries no factor; choose another y

  const i64 g1 = gcd_i64(f - 1, N);
  const i64 g2 = gcd_i64(f + 1, N);
  res.gcd_outcomes = {g1, g2};
  std::vector<i64> nontrivial;
  for (i64 g : res.gcd_outcomes)
    if (g > 1 && g < N) nontrivial.push_back(g);
  if (nontrivial.empty()) return res;  // r' was not a usable period estimate

  res.f1 = nontrivial.front();
  res.f2 = nontrivial.size() > 1 ? nontrivial[1] : N / res.f1;
  if (res.f1 > res.f2) std::swap(res.f1, res.f2);
  res.ok = res.f1 * res.f2 == N;
  res.status = res.ok ? "ok" : "retry_new_y";
  return res;
}

FactorResult factor(i64 N, const FactorPolicy& policy) {
  if (N < 3) throw PreconditionError("TooSmall", "modulus must be at least 3");
  if (is_prime_i64(N)) throw PreconditionError("PrimeModulus", "modulus is prime");
  if (is_prime_power(N))
    throw PreconditionError("PrimePower", "modulus is a prime power; classical methods apply");
  if (N % 2 == 0) throw PreconditionError("EvenModulus", "modulus must be odd");
  if (policy.max_y_attempts < 1)
    throw PreconditionError("BadBudget", "need at least one y attempt");

  Modulus mod = Modulus::make(N);
  SpinGeometry geom = SpinGeometry::make(mod, policy.ni, policy.eps_i);
  const i64 budget = policy.m_budget > 0 ? policy.m_budget : N;

  std::mt19937_64 rng(policy.seed);
  std::uniform_int_distribution<i64> draw(2, N - 2);
  i64 next_ascending = 2;
  auto pick_y = [&]() -> i64 {
    if (policy.y_order == YOrder::SeededRandom) {
      for (;;) {
        i64 y = draw(rng);
        if (gcd_i64(y, N) == 1) return y;
      }
    }
    while (next_ascending <= N - 2 && gcd_i64(next_ascending, N) != 1) ++next_ascending;
    return next_ascending <= N - 2 ? next_ascending++ : 0;
  };

  FactorResult res;
  res.N = N;
  res.status = "exhausted";
  for (int attempt = 0; attempt < policy.max_y_attempts; ++attempt) {
    const i64 y = pick_y();
    if (y == 0) break;  // ascending order ran off the residue ring
    res.y_trace.push_back(y);

    ScanResult scan = scan_intensity(geom, y, 0, budget);
    ZeroPoints zeros;
    try {
      zeros = find_zero_points(scan, policy.tol);
    } catch (const ComputationError&) {
      continue;  // no zero inside the m budget; try another y
    }

    FactorResult pass = classical_postprocess(zeros.r_prime, y, N);
    res.r_prime = pass.r_prime;
    res.f_chain = pass.f_chain;
    res.gcd_outcomes = pass.gcd_outcomes;
    if (pass.ok) {
      res.ok = true;
      res.status = "ok";
      res.f1 = pass.f1;
      res.f2 = pass.f2;
      return res;
    }
  }
  throw ComputationError("Exhausted", "factor search spent its y budget without success");
}

}  // namespace mqf
