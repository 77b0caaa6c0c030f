#pragma once

#include <vector>

#include "mqfactor/common.hpp"

namespace mqf {

// Residue arithmetic modulo N.  This build targets desk scale: N < 2^20,
// so every intermediate product fits comfortably in int64.

// a reduced into [0, N).
i64 mod_norm(i64 a, i64 N);

// y^m mod N by square-and-multiply.  Negative m goes through the inverse
// and therefore requires gcd(y, N) = 1.
i64 mod_pow(i64 y, i64 m, i64 N);

// Inverse via extended Euclid.  Throws NotCoprime when gcd(y, N) > 1;
// for this pipeline that error is itself a factor lead.
i64 mod_inverse(i64 y, i64 N);

// Smallest r >= 1 with y^r = 1 mod N, found by plain iteration.  Kept
// deliberately brute force: it is the trusted reference the rest of the
// code is checked against.
i64 multiplicative_order(i64 y, i64 N);

// N together with the register size that holds it: L = 2^n, 2^(n-1) <= N < L.
// p and q are filled in when N is a semiprime (p <= q), else left 0.
struct Modulus {
  i64 N = 0;
  int n = 0;
  i64 L = 0;
  i64 p = 0, q = 0;

  bool has_pq() const { return p != 0; }
  static Modulus make(i64 N);
};

// One cycle of x -> x*y mod N. cycle[0] is the smallest member; following
// entries step by multiplication with y.
struct Orbit {
  i64 rep = 0;
  std::vector<i64> cycle;
  i64 period = 0;
};

// Full orbit decomposition of {0..N-1} under x -> x*y mod N.
struct OrbitTable {
  Modulus mod;
  i64 y = 0;
  std::vector<Orbit> orbits;      // ascending by rep
  i64 r = 0;                      // multiplicative order of y = max period
  i64 t = 0;                      // number of orbits
  i64 d = 0;                      // number of full-period orbits
  bool degenerate = false;        // y = 1 mod N: every point is fixed
  std::vector<int> orbit_index;   // x -> position in orbits
  std::vector<int> cycle_pos;     // x -> index of x inside its cycle
};

OrbitTable orbit_decompose(i64 y, i64 N);

// Census of residues living in full-period orbits against the
// (p-1)(q-1) floor; the deficit N - r*d can never exceed p+q-1.
struct OrbitCensus {
  i64 count = 0;          // r*d
  i64 bound = 0;          // (p-1)(q-1)
  i64 deficit = 0;        // N - r*d
  i64 deficit_bound = 0;  // p+q-1
  bool pass = false;
};

// Throws BadFactorization unless p*q == table.mod.N.
OrbitCensus parker_plenio_check(const OrbitTable& table, i64 p, i64 q);

i64 gcd_i64(i64 a, i64 b);
bool is_prime_i64(i64 v);

}  // namespace mqf
