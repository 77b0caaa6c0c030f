#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mqfactor/mqspec.hpp"

namespace mqf {

// Closed-form coherent intensities from orbit periods alone.  The m-step
// transverse response loses exactly the orbits whose period divides m:
//   I(m)   = 1/4 ni 2^ni eps * (N - sum of periods r_x with r_x | m)
//   I_y(m) = 1/8 ni 2^ni eps * (N - sum of periods r_x with r_x | 2m)
double closed_form_intensity(const OrbitTable& table, const SpinGeometry& geom, i64 m);
double closed_form_intensity_y(const OrbitTable& table, const SpinGeometry& geom, i64 m);

enum class ScanMode { Exhaustive, LocalWindow };

struct ScanPoint {
  i64 m = 0;
  double I_direct = 0;
  double Iy_direct = 0;
  double I_closed = 0;
  double Iy_closed = 0;
  CoherenceSpectrum orders;  // per-order content of the antisymmetric state
};

struct ScanResult {
  i64 N = 0;
  i64 y = 0;
  ScanMode mode = ScanMode::Exhaustive;
  std::vector<ScanPoint> points;     // ascending m
  double max_discrepancy = 0;        // worst |direct - closed| over the scan
};

// Evaluates both routes at every m in [m_lo, m_hi] (empty when m_lo > m_hi).
// Points are independent, so the parallel scan is bit-identical to the
// serial reference.
ScanResult scan_intensity(const SpinGeometry& geom, i64 y, i64 m_lo, i64 m_hi,
                          ExecMode mode = ExecMode::Parallel);
ScanResult scan_intensity_serial(const SpinGeometry& geom, i64 y, i64 m_lo, i64 m_hi);

// Local probe around a suspected zero point: covers
// [max(0, center - halfwidth), center + halfwidth].
ScanResult scan_window(const SpinGeometry& geom, i64 y, i64 center, i64 halfwidth,
                       ExecMode mode = ExecMode::Parallel);

struct ZeroPoints {
  std::vector<i64> points;  // ascending m with Iy_direct <= tol
  i64 r_prime = 0;          // smallest positive entry
};

// Absolute-tolerance zero detection on a finished scan.  Throws NoZeroFound
// when no positive zero point lies in the scanned range.
ZeroPoints find_zero_points(const ScanResult& scan, double tol);

struct FactorResult {
  i64 N = 0;
  bool ok = false;
  i64 f1 = 0;
  i64 f2 = 0;                     // ok implies 1 < f1 <= f2 and f1 * f2 == N
  std::string status;             // "ok" | "retry_new_y" | "exhausted"
  std::vector<i64> y_trace;       // every y tried, in order
  i64 r_prime = 0;                // zero point behind the final attempt
  std::vector<i64> f_chain;       // y^(r'/2^k) mod N values, halving included
  std::vector<i64> gcd_outcomes;  // gcd(f -+ 1, N) for the final f
};

// Classical tail of one attempt: f = y^r' mod N; f == 1 walks the halving
// chain while r' stays even; f == N-1 or a dead chain asks for a new y;
// anything else yields gcd(f -+ 1, N) filtered to the nontrivial factors.
FactorResult classical_postprocess(i64 r_prime, i64 y, i64 N);

enum class YOrder { AscendingCoprime, SeededRandom };

struct FactorPolicy {
  YOrder y_order = YOrder::AscendingCoprime;
  std::uint64_t seed = 0;    // drives SeededRandom draws; recorded in traces
  i64 m_budget = 0;          // scan covers [0, m_budget]; 0 means N
  int max_y_attempts = 32;
  double tol = 1e-9;
  int ni = 1;
  double eps_i = 1.0;
};

// Full pipeline: pick y, scan, detect r', post-process, retry on demand.
// Requires odd composite N that is not a prime power; throws Exhausted once
// the attempt budget is spent.
FactorResult factor(i64 N, const FactorPolicy& policy = {});

}  // namespace mqf
