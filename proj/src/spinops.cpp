#include "mqfactor/spinops.hpp"

#include <map>

namespace mqf {

namespace {

constexpr int kJointSpinCap = 14;  // dense joint matrices stay <= 2^14 wide

const cplx kI(0.0, 1.0);

// row, col of the single nonzero entry of a matrix-unit symbol
void unit_entry(ISym s, int* row, int* col) {
  switch (s) {
    case ISym::E00: *row = 0; *col = 0; return;
    case ISym::E11: *row = 1; *col = 1; return;
    case ISym::E01: *row = 0; *col = 1; return;
    case ISym::E10: *row = 1; *col = 0; return;
    default:
      throw PreconditionError("Precondition", "not a matrix-unit symbol");
  }
}

}  // namespace

SpinGeometry SpinGeometry::make(const Modulus& mod, int ni, double eps_i) {
  if (ni < 1 || ni > 2)
    throw PreconditionError("UnsupportedNi", "ni must be 1 or 2, got " + std::to_string(ni));
  if (ni + mod.n > kJointSpinCap)
    throw PreconditionError("TooLarge", "ni + n = " + std::to_string(ni + mod.n) +
                                            " exceeds the joint cap " + std::to_string(kJointSpinCap));
  if (!(eps_i > 0))
    throw PreconditionError("Precondition", "eps_i must be positive");
  SpinGeometry g;
  g.mod = mod;
  g.ni = ni;
  g.eps_i = eps_i;
  return g;
}

Eigen::Matrix2cd isym_matrix(ISym s) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (s) {
    case ISym::E00: m(0, 0) = 1; break;
    case ISym::E11: m(1, 1) = 1; break;
    case ISym::E01: m(0, 1) = 1; break;
    case ISym::E10: m(1, 0) = 1; break;
    case ISym::Ix:  m(0, 1) = 0.5; m(1, 0) = 0.5; break;
    case ISym::Iy:  m(0, 1) = -0.5 * kI; m(1, 0) = 0.5 * kI; break;
    case ISym::E:   m.setIdentity(); break;
  }
  return m;
}

ModExpPropagator make_propagator(const Modulus& mod, i64 y, i64 m) {
  ModExpPropagator p;
  p.mod = mod;
  p.y = mod_norm(y, mod.N);
  p.m = m;
  if (gcd_i64(p.y, mod.N) != 1)
    throw PreconditionError("NotCoprime", "propagator needs gcd(y, N) = 1; gcd(" +
                                              std::to_string(y) + ", " + std::to_string(mod.N) + ") > 1");
  const i64 step = mod_pow(p.y, m, mod.N);
  p.map.resize(static_cast<size_t>(mod.L));
  for (i64 x = 0; x < mod.N; ++x) p.map[static_cast<size_t>(x)] = x * step % mod.N;
  for (i64 x = mod.N; x < mod.L; ++x) p.map[static_cast<size_t>(x)] = x;
  return p;
}

void permute_scale_into_serial(Mat& out, const Mat& in, const std::vector<i64>& rowmap,
                               const std::vector<i64>& colmap, cplx coeff) {
  const i64 rows = in.rows(), cols = in.cols();
  out.resize(rows, cols);
  for (i64 j = 0; j < cols; ++j) {
    const i64 tj = colmap[static_cast<size_t>(j)];
    for (i64 i = 0; i < rows; ++i) out(rowmap[static_cast<size_t>(i)], tj) = coeff * in(i, j);
  }
}

void permute_scale_into(Mat& out, const Mat& in, const std::vector<i64>& rowmap,
                        const std::vector<i64>& colmap, cplx coeff, ExecMode mode) {
  if (mode == ExecMode::Serial) {
    permute_scale_into_serial(out, in, rowmap, colmap, coeff);
    return;
  }
  const i64 rows = in.rows(), cols = in.cols();
  out.resize(rows, cols);
#pragma omp parallel for schedule(static)
  for (i64 j = 0; j < cols; ++j) {
    const i64 tj = colmap[static_cast<size_t>(j)];
    for (i64 i = 0; i < rows; ++i) out(rowmap[static_cast<size_t>(i)], tj) = coeff * in(i, j);
  }
}

StructuredState initial_state_uniform(const SpinGeometry& geom) {
  StructuredState st;
  st.geom = geom;
  const i64 L = geom.sdim();
  for (int j = 0; j < geom.ni; ++j) {
    Term t;
    t.label.assign(static_cast<size_t>(geom.ni), ISym::E);
    t.label[static_cast<size_t>(j)] = ISym::Ix;
    t.smat = geom.eps_i * Mat::Identity(L, L);
    st.terms.push_back(std::move(t));
  }
  return st;
}

bool GeneralStateFlags::all_ok() const {
  for (const PerSpin& s : per_spin)
    if (!s.flat_ok || !s.tail_ok) return false;
  return true;
}

StructuredState initial_state_general(const SpinGeometry& geom,
                                      const std::vector<Eigen::VectorXd>& diagonals,
                                      GeneralStateFlags* flags) {
  const i64 L = geom.sdim();
  const i64 N = geom.mod.N;
  if (static_cast<int>(diagonals.size()) != geom.ni)
    throw PreconditionError("DimensionMismatch", "need one diagonal per I spin: got " +
                                                     std::to_string(diagonals.size()) + " for ni = " +
                                                     std::to_string(geom.ni));
  for (const Eigen::VectorXd& d : diagonals)
    if (d.size() != L)
      throw PreconditionError("DimensionMismatch", "diagonal length " + std::to_string(d.size()) +
                                                       " != L = " + std::to_string(L));

  if (flags) {
    flags->per_spin.clear();
    flags->pq_known = geom.mod.has_pq();
    for (const Eigen::VectorXd& d : diagonals) {
      GeneralStateFlags::PerSpin s;
      for (i64 k = 0; k < L; ++k) {
        const double sq = d[k] * d[k];
        s.sum_sq_full += sq;
        if (k < N) {
          s.sum_sq_head += sq;
          s.max_sq = std::max(s.max_sq, sq);
        }
      }
      // flatness: head mass must dominate any single residue by a margin of
      // p+q-1 desk-calibrated to a factor 10; tail: padding states [N, L)
      // must not carry more than n times the head mass in total
      if (flags->pq_known)
        s.flat_ok = s.sum_sq_head >= 10.0 * double(geom.mod.p + geom.mod.q - 1) * s.max_sq;
      s.tail_ok = s.sum_sq_head > 0 && s.sum_sq_full / s.sum_sq_head <= double(geom.mod.n);
      flags->per_spin.push_back(s);
    }
  }

  StructuredState st;
  st.geom = geom;
  for (int j = 0; j < geom.ni; ++j) {
    Term t;
    t.label.assign(static_cast<size_t>(geom.ni), ISym::E);
    t.label[static_cast<size_t>(j)] = ISym::Ix;
    t.smat = Mat::Zero(L, L);
    t.smat.diagonal() = geom.eps_i * diagonals[static_cast<size_t>(j)].cast<cplx>();
    st.terms.push_back(std::move(t));
  }
  return st;
}

std::vector<AtomicTerm> expand_atomic(const Word& label) {
  std::vector<AtomicTerm> acc{{Word{}, cplx(1.0, 0.0)}};
  for (ISym s : label) {
    // per-spin expansion into matrix units
    std::vector<std::pair<ISym, cplx>> parts;
    switch (s) {
      case ISym::E00:
      case ISym::E11:
      case ISym::E01:
      case ISym::E10: parts = {{s, 1.0}}; break;
      case ISym::E:   parts = {{ISym::E00, 1.0}, {ISym::E11, 1.0}}; break;
      case ISym::Ix:  parts = {{ISym::E01, 0.5}, {ISym::E10, 0.5}}; break;
      case ISym::Iy:  parts = {{ISym::E01, -0.5 * kI}, {ISym::E10, 0.5 * kI}}; break;
    }
    std::vector<AtomicTerm> next;
    next.reserve(acc.size() * parts.size());
    for (const AtomicTerm& a : acc)
      for (const auto& [sym, c] : parts) {
        AtomicTerm t = a;
        t.word.push_back(sym);
        t.coeff *= c;
        next.push_back(std::move(t));
      }
    acc = std::move(next);
  }
  return acc;
}

void atomic_block(const Word& word, i64* block_row, i64* block_col) {
  i64 br = 0, bc = 0;
  for (ISym s : word) {
    int r, c;
    unit_entry(s, &r, &c);
    br = br * 2 + r;
    bc = bc * 2 + c;
  }
  *block_row = br;
  *block_col = bc;
}

StructuredState evolve(const StructuredState& state, i64 y, i64 m, ExecMode mode) {
  const SpinGeometry& geom = state.geom;
  // one permutation table per possible count of conditional applications
  std::vector<ModExpPropagator> pow;
  for (int a = 0; a <= geom.ni; ++a) pow.push_back(make_propagator(geom.mod, y, m * a));

  std::map<Word, Mat> merged;
  Mat scratch;
  for (const Term& term : state.terms) {
    for (const AtomicTerm& at : expand_atomic(term.label)) {
      // E11 and E10 see the permutation from the left (ket side), E11 and
      // E01 from the right (bra side); E00 sees nothing
      int left = 0, right = 0;
      for (ISym s : at.word) {
        if (s == ISym::E11 || s == ISym::E10) ++left;
        if (s == ISym::E11 || s == ISym::E01) ++right;
      }
      permute_scale_into(scratch, term.smat, pow[static_cast<size_t>(left)].map,
                         pow[static_cast<size_t>(right)].map, at.coeff, mode);
      auto [it, fresh] = merged.try_emplace(at.word, scratch);
      if (!fresh) it->second += scratch;
    }
  }

  StructuredState out;
  out.geom = geom;
  for (auto& [word, smat] : merged) out.terms.push_back(Term{word, std::move(smat)});
  return out;
}

StructuredState linear_combine(cplx c1, const StructuredState& a, cplx c2,
                               const StructuredState& b) {
  std::map<Word, Mat> merged;
  auto fold = [&](cplx c, const StructuredState& s) {
    for (const Term& t : s.terms) {
      auto [it, fresh] = merged.try_emplace(t.label, c * t.smat);
      if (!fresh) it->second += c * t.smat;
    }
  };
  fold(c1, a);
  fold(c2, b);
  StructuredState out;
  out.geom = a.geom;
  for (auto& [word, smat] : merged) out.terms.push_back(Term{word, std::move(smat)});
  return out;
}

StructuredState antisymmetric_part(const StructuredState& state, i64 y, i64 m, ExecMode mode) {
  return linear_combine(0.5, evolve(state, y, m, mode), -0.5, evolve(state, y, -m, mode));
}

Mat assemble(const StructuredState& state) {
  const SpinGeometry& geom = state.geom;
  if (geom.ni + geom.mod.n > kJointSpinCap)
    throw PreconditionError("TooLarge", "joint dimension exceeds 2^" + std::to_string(kJointSpinCap));
  const i64 L = geom.sdim();
  const i64 D = geom.dim();
  Mat full = Mat::Zero(D, D);
  for (const Term& term : state.terms) {
    Eigen::MatrixXcd w = isym_matrix(term.label.at(0));
    for (size_t k = 1; k < term.label.size(); ++k) {
      const Eigen::Matrix2cd nk = isym_matrix(term.label[k]);
      Eigen::MatrixXcd grown(w.rows() * 2, w.cols() * 2);
      for (i64 i = 0; i < w.rows(); ++i)
        for (i64 j = 0; j < w.cols(); ++j) grown.block(2 * i, 2 * j, 2, 2) = w(i, j) * nk;
      w = std::move(grown);
    }
    for (i64 bi = 0; bi < w.rows(); ++bi)
      for (i64 bj = 0; bj < w.cols(); ++bj)
        if (w(bi, bj) != cplx(0.0, 0.0))
          full.block(bi * L, bj * L, L, L) += w(bi, bj) * term.smat;
  }
  return full;
}

}  // namespace mqf
