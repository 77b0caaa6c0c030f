#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "mqfactor/modarith.hpp"

namespace mqf {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Register geometry: ni ancilla I spins (1 or 2 here) driving a work
// register of n S spins that holds residues mod N.  I_kz|0> = +1/2|0>.
struct SpinGeometry {
  Modulus mod;
  int ni = 1;
  double eps_i = 1.0;  // uniform I polarization

  i64 sdim() const { return mod.L; }
  i64 idim() const { return i64(1) << ni; }
  i64 dim() const { return idim() * sdim(); }
  static SpinGeometry make(const Modulus& mod, int ni, double eps_i);
};

// Symbolic single-spin operators used in I-register label words.
// E00/E11/E01/E10 are the matrix units |0><0| etc.; Ix, Iy, E are the
// usual spin-1/2 operators and the identity.
enum class ISym : unsigned char { E00, E11, E01, E10, Ix, Iy, E };

using Word = std::vector<ISym>;  // one symbol per I spin

// 2x2 matrix of a label symbol.
Eigen::Matrix2cd isym_matrix(ISym s);

// One summand of a structured operator: (label word over the I register)
// tensor (dense matrix on the S register).
struct Term {
  Word label;
  Mat smat;  // L x L
};

// Density operator kept as a short sum of I-word x S-matrix products.
// Permutation dynamics never needs the full joint matrix; assemble()
// materializes it on demand for checks and readout.
struct StructuredState {
  SpinGeometry geom;
  std::vector<Term> terms;
};

// Permutation x -> x * y^m mod N on [0, N), identity on [N, L).
struct ModExpPropagator {
  Modulus mod;
  i64 y = 1;
  i64 m = 0;
  std::vector<i64> map;  // size L
};

// Handles negative m through the inverse residue; throws NotCoprime.
ModExpPropagator make_propagator(const Modulus& mod, i64 y, i64 m);

// out(rowmap[i], colmap[j]) = coeff * in(i, j).  Pure data movement, so the
// parallel kernel is bit-identical to the serial reference.
void permute_scale_into(Mat& out, const Mat& in, const std::vector<i64>& rowmap,
                        const std::vector<i64>& colmap, cplx coeff, ExecMode mode);
void permute_scale_into_serial(Mat& out, const Mat& in, const std::vector<i64>& rowmap,
                               const std::vector<i64>& colmap, cplx coeff);

// Thermal-equilibrium transverse state after the two-step phase cycle:
// sum_k eps_i I_kx tensor identity.  One term per I spin.
StructuredState initial_state_uniform(const SpinGeometry& geom);

// Advisory flags for general diagonal preparations.  The flatness and
// tail-mass conditions are reported, never enforced.
struct GeneralStateFlags {
  struct PerSpin {
    double sum_sq_head = 0;   // sum of rho(k)^2 over k < N
    double sum_sq_full = 0;   // over k < L
    double max_sq = 0;        // max rho(k)^2 over k < N
    bool flat_ok = false;     // head mass >= 10 * (p+q-1) * max_sq
    bool tail_ok = false;     // full/head mass ratio <= n
  };
  std::vector<PerSpin> per_spin;
  bool pq_known = false;
  bool all_ok() const;
};

// sum_j eps_i I_jx tensor diag(rho_j); one diagonal vector per I spin.
StructuredState initial_state_general(const SpinGeometry& geom,
                                      const std::vector<Eigen::VectorXd>& diagonals,
                                      GeneralStateFlags* flags = nullptr);

// Conjugation by the conditional propagator applied m times: each I spin in
// |1> drives one application of x -> x*y on the S register, |0> none.
// Matrix-unit words pick up one-sided permutations (E11: both sides,
// E01/E10: one side); Ix/Iy/E split into matrix-unit words first.
StructuredState evolve(const StructuredState& state, i64 y, i64 m,
                       ExecMode mode = ExecMode::Parallel);

// (evolve(+m) - evolve(-m)) / 2: the part of the response odd in m.
StructuredState antisymmetric_part(const StructuredState& state, i64 y, i64 m,
                                   ExecMode mode = ExecMode::Parallel);

// c1 * a + c2 * b with terms merged by identical label word.
StructuredState linear_combine(cplx c1, const StructuredState& a, cplx c2,
                               const StructuredState& b);

// Dense joint matrix, dimension 2^ni * L.  Throws TooLarge past ni+n = 14.
Mat assemble(const StructuredState& state);

// Expansion of a label word into matrix-unit words with coefficients;
// atomic words address disjoint I-register matrix entries.
struct AtomicTerm {
  Word word;  // only E00/E11/E01/E10 symbols
  cplx coeff;
};
std::vector<AtomicTerm> expand_atomic(const Word& label);

// Joint-space entry address of an atomic word: block row/col in the I
// register.  Spin 0 is the most significant bit.
void atomic_block(const Word& word, i64* block_row, i64* block_col);

}  // namespace mqf
