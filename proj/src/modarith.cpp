#include "mqfactor/modarith.hpp"

#include <numeric>

namespace mqf {

namespace {

constexpr i64 kMaxN = i64(1) << 20;

void require_modulus(i64 N) {
  if (N < 2) throw PreconditionError("Precondition", "modulus must be >= 2, got " + std::to_string(N));
  if (N >= kMaxN)
    throw PreconditionError("TooLarge", "N = " + std::to_string(N) + " exceeds the desk-scale cap 2^20");
}

}  // namespace

i64 gcd_i64(i64 a, i64 b) { return std::gcd(a, b); }

bool is_prime_i64(i64 v) {
  if (v < 2) return false;
  for (i64 d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

i64 mod_norm(i64 a, i64 N) {
  require_modulus(N);
  i64 v = a % N;
  return v < 0 ? v + N : v;
}

i64 mod_pow(i64 y, i64 m, i64 N) {
  require_modulus(N);
  i64 base = mod_norm(y, N);
  if (m < 0) {
    base = mod_inverse(base, N);
    m = -m;
  }
  i64 acc = 1 % N;
  while (m > 0) {
    if (m & 1) acc = acc * base % N;
    base = base * base % N;
    m >>= 1;
  }
  return acc;
}

i64 mod_inverse(i64 y, i64 N) {
  require_modulus(N);
  i64 a = mod_norm(y, N);
  // extended Euclid: track s with s*y = r (mod N)
  i64 r0 = N, r1 = a, s0 = 0, s1 = 1;
  while (r1 != 0) {
    i64 q = r0 / r1;
    i64 r2 = r0 - q * r1;
    i64 s2 = s0 - q * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  if (r0 != 1)
    throw PreconditionError("NotCoprime", "gcd(" + std::to_string(y) + ", " + std::to_string(N) +
                                              ") = " + std::to_string(r0) + ", no inverse");
  return mod_norm(s0, N);
}

i64 multiplicative_order(i64 y, i64 N) {
  require_modulus(N);
  i64 a = mod_norm(y, N);
  if (gcd_i64(a, N) != 1)
    throw PreconditionError("NotCoprime", "order undefined: gcd(" + std::to_string(y) + ", " +
                                              std::to_string(N) + ") > 1");
  i64 acc = a, r = 1;
  while (acc != 1) {
    acc = acc * a % N;
    ++r;
    if (r > N)
      throw ComputationError("Internal", "order search exceeded N iterations");
  }
  return r;
}

Modulus Modulus::make(i64 N) {
  if (N < 3) throw PreconditionError("Precondition", "N must be >= 3, got " + std::to_string(N));
  if (N >= kMaxN)
    throw PreconditionError("TooLarge", "N = " + std::to_string(N) + " exceeds the desk-scale cap 2^20");
  Modulus m;
  m.N = N;
  m.n = 0;
  while ((i64(1) << m.n) <= N) ++m.n;
  m.L = i64(1) << m.n;
  for (i64 d = 2; d * d <= N; ++d) {
    if (N % d == 0) {
      if (is_prime_i64(d) && is_prime_i64(N / d)) {
        m.p = d;
        m.q = N / d;
      }
      break;  // d is the smallest factor; N is semiprime iff N/d is prime
    }
  }
  return m;
}

OrbitTable orbit_decompose(i64 y, i64 N) {
  Modulus mod = Modulus::make(N);
  i64 a = mod_norm(y, N);
  if (gcd_i64(a, N) != 1)
    throw PreconditionError("NotCoprime", "x -> x*y is not a permutation: gcd(" + std::to_string(y) +
                                              ", " + std::to_string(N) + ") > 1");
  OrbitTable table;
  table.mod = mod;
  table.y = a;
  table.degenerate = (a == 1);
  table.orbit_index.assign(static_cast<size_t>(N), -1);
  table.cycle_pos.assign(static_cast<size_t>(N), -1);

  for (i64 x = 0; x < N; ++x) {
    if (table.orbit_index[static_cast<size_t>(x)] >= 0) continue;
    Orbit orbit;
    orbit.rep = x;
    i64 cur = x;
    do {
      table.orbit_index[static_cast<size_t>(cur)] = static_cast<int>(table.orbits.size());
      table.cycle_pos[static_cast<size_t>(cur)] = static_cast<int>(orbit.cycle.size());
      orbit.cycle.push_back(cur);
      cur = cur * a % N;
    } while (cur != x);
    orbit.period = static_cast<i64>(orbit.cycle.size());
    table.orbits.push_back(std::move(orbit));
  }

  table.t = static_cast<i64>(table.orbits.size());
  table.r = multiplicative_order(a, N);
  for (const Orbit& o : table.orbits)
    if (o.period == table.r) ++table.d;
  return table;
}

OrbitCensus parker_plenio_check(const OrbitTable& table, i64 p, i64 q) {
  if (p * q != table.mod.N)
    throw PreconditionError("BadFactorization", std::to_string(p) + "*" + std::to_string(q) +
                                                    " != " + std::to_string(table.mod.N));
  OrbitCensus c;
  c.count = table.r * table.d;
  c.bound = (p - 1) * (q - 1);
  c.deficit = table.mod.N - c.count;
  c.deficit_bound = p + q - 1;
  c.pass = c.count >= c.bound && c.deficit <= c.deficit_bound;
  return c;
}

}  // namespace mqf
