#include "gliaison/fpmod.hpp"

#include <algorithm>

namespace gliaison {

namespace {

GradedMatrix ctx_reduce(GradedMatrix M, const RingCtx& R) {
  if (!R.is_quotient()) return M;
  for (auto& row : M.e)
    for (auto& f : row) f = ctx_nf(f, R);
  return M;
}

std::vector<MVec> ix_columns(const FreeMod& F, const RingCtx& R) {
  std::vector<MVec> out;
  for (const auto& q : R.ix_gb)
    for (int i = 0; i < F.rank(); ++i) {
      std::vector<MTerm> ts;
      for (const auto& t : q.ts) ts.push_back({i, t});
      out.push_back(mvec_normalize(std::move(ts), *F.ring));
    }
  return out;
}

}  // namespace

FPModule fp_free(const RingCtx& R, std::vector<int> twists) {
  FreeMod F0 = free_mod(R.S, std::move(twists));
  FreeMod F1 = free_mod(R.S, {});
  return FPModule{R, zero_matrix(F1, F0), std::nullopt};
}

FPModule fp_from_presentation(const RingCtx& R, GradedMatrix P) {
  check_graded(P);
  return FPModule{R, ctx_reduce(std::move(P), R), std::nullopt};
}

FPModule fp_cyclic(const RingCtx& R, const std::vector<Poly>& gens) {
  std::vector<int> tw;
  std::vector<Poly> red;
  for (const auto& g : gens) {
    Poly f = ctx_nf(g, R);
    if (f.is_zero()) continue;
    tw.push_back(f.degree());
    red.push_back(std::move(f));
  }
  GradedMatrix P = zero_matrix(free_mod(R.S, tw), free_mod(R.S, {0}));
  for (size_t j = 0; j < red.size(); ++j) P.e[0][j] = red[j];
  return FPModule{R, std::move(P), std::nullopt};
}

FPModule ideal_module(const Ideal& I, const RingCtx& R) {
  std::vector<Poly> red;
  for (const auto& g : I.gens()) {
    Poly f = ctx_nf(g, R);
    if (!f.is_zero()) red.push_back(std::move(f));
  }
  std::vector<int> tw;
  for (const auto& f : red) tw.push_back(f.degree());
  GradedMatrix row = zero_matrix(free_mod(R.S, tw), free_mod(R.S, {0}));
  for (size_t j = 0; j < red.size(); ++j) row.e[0][j] = red[j];
  std::vector<int> keep = minimal_column_set(row, R);
  std::vector<int> tw2;
  GradedMatrix row2 = zero_matrix(free_mod(R.S, [&] {
                                    for (int j : keep) tw2.push_back(tw[j]);
                                    return tw2;
                                  }()),
                                  free_mod(R.S, {0}));
  for (size_t j = 0; j < keep.size(); ++j) row2.e[0][j] = red[keep[j]];
  FPModule M{R, syzygies(row2, R), row2};
  return M;
}

bool fp_is_zero(const FPModule& M) {
  return fp_minimize(M).cover().rank() == 0;
}

FPModule fp_minimize(const FPModule& M) {
  GradedMatrix P = ctx_reduce(M.pres, M.R);
  P = minimalize_presentation(std::move(P));
  P = ctx_reduce(std::move(P), M.R);
  P = minimalize_presentation(std::move(P));
  std::vector<int> keep = minimal_column_set(P, M.R);
  std::vector<MVec> cols;
  std::vector<int> tw;
  for (int j : keep) {
    MVec c = column_of(P, j);
    if (c.is_zero()) continue;
    tw.push_back(P.src.tw[j]);
    cols.push_back(std::move(c));
  }
  return FPModule{M.R, matrix_from_columns(P.dst, cols, tw), std::nullopt};
}

FPModule fp_twist(const FPModule& M, int a) {
  FPModule T = M;
  for (auto& t : T.pres.src.tw) t -= a;
  for (auto& t : T.pres.dst.tw) t -= a;
  if (T.embed) {
    for (auto& t : T.embed->src.tw) t -= a;
    for (auto& t : T.embed->dst.tw) t -= a;
  }
  return T;
}

FPModule fp_direct_sum(const FPModule& A, const FPModule& B) {
  FreeMod F0 = concat(A.cover(), B.cover());
  FreeMod F1 = concat(A.pres.src, B.pres.src);
  GradedMatrix P = zero_matrix(F1, F0);
  int r = A.cover().rank(), c = A.pres.cols();
  for (int i = 0; i < A.pres.rows(); ++i)
    for (int j = 0; j < A.pres.cols(); ++j) P.e[i][j] = A.pres.e[i][j];
  for (int i = 0; i < B.pres.rows(); ++i)
    for (int j = 0; j < B.pres.cols(); ++j) P.e[r + i][c + j] = B.pres.e[i][j];
  return FPModule{A.R, std::move(P), std::nullopt};
}

long fp_hf(const FPModule& M, int d) { return module_hf(M.pres, M.R, d); }

int ctx_krull(const RingCtx& R) {
  int n = (int)R.S->nvars();
  if (!R.is_quotient()) return n;
  return dimension_codim(Ideal(R.S, R.ix_gens)).krull;
}

int fp_rank(const FPModule& M) {
  int k = ctx_krull(M.R);
  int lo = 0, hi = 0;
  for (int t : M.cover().tw) { lo = std::min(lo, t); hi = std::max(hi, t); }
  hi += k + 8;
  std::vector<long> hm, hr;
  for (int d = lo; d <= hi; ++d) {
    hm.push_back(fp_hf(M, d));
    hr.push_back(ring_hf(M.R, d - lo));  // ring HF from degree 0 upwards
  }
  for (int it = 0; it < k - 1; ++it) {
    for (size_t d = hm.size() - 1; d >= 1; --d) hm[d] -= hm[d - 1];
    for (size_t d = hr.size() - 1; d >= 1; --d) hr[d] -= hr[d - 1];
  }
  size_t n = hm.size();
  long em = hm[n - 1], er = hr[n - 1];
  if (hm[n - 2] != em || hm[n - 3] != em || hr[n - 2] != er || er == 0)
    throw LimitError("fp_rank: Hilbert window did not stabilize");
  if (em % er != 0)
    throw LimitError("fp_rank: multiplicity not a multiple of the ring's");
  return (int)(em / er);
}

FreeMod minimal_cover(const FPModule& M) { return fp_minimize(M).cover(); }

FPModule syzygy_module(const FPModule& M) {
  FPModule Mm = fp_minimize(M);
  if (Mm.cover().rank() == 0) return fp_free(M.R, {});
  GradedMatrix Pm = Mm.pres;
  return FPModule{M.R, syzygies(Pm, M.R), Pm};
}

FPModule dual(const FPModule& M) {
  GradedMatrix P = ctx_reduce(M.pres, M.R);
  GradedMatrix T = transpose(P);
  GradedMatrix K = kernel(T, M.R);
  {
    std::vector<int> keep = minimal_column_set(K, M.R);
    std::vector<MVec> cols;
    std::vector<int> tw;
    for (int j : keep) { cols.push_back(column_of(K, j)); tw.push_back(K.src.tw[j]); }
    K = matrix_from_columns(T.src, cols, tw);
  }
  return FPModule{M.R, syzygies(K, M.R), K};
}

Poly dual_eval(const FPModule& dualM, int j, const std::vector<Poly>& cover_vec) {
  if (!dualM.embed)
    throw std::logic_error("dual_eval: module has no embedding data");
  const GradedMatrix& K = *dualM.embed;
  Poly acc = poly_zero(dualM.R.S);
  for (int i = 0; i < K.rows(); ++i)
    acc = poly_add(acc, poly_mul(K.e[i][j], cover_vec[i]));
  return ctx_nf(acc, dualM.R);
}

FPModule subquotient(const GradedMatrix& U, const GradedMatrix& V,
                     const RingCtx& R) {
  if (U.dst.tw != V.dst.tw && V.cols() > 0)
    throw std::logic_error("subquotient: ambient module mismatch");
  // relations on the U-generators: first block of ker[U | V]
  FreeMod src = concat(U.src, V.src);
  GradedMatrix UV = zero_matrix(src, U.dst);
  for (int i = 0; i < U.rows(); ++i) {
    for (int j = 0; j < U.cols(); ++j) UV.e[i][j] = U.e[i][j];
    for (int j = 0; j < V.cols(); ++j) UV.e[i][U.cols() + j] = V.e[i][j];
  }
  GradedMatrix K = kernel(UV, R);
  std::vector<MVec> rel;
  std::vector<int> tw;
  for (int j = 0; j < K.cols(); ++j) {
    std::vector<MTerm> ts;
    MVec col = column_of(K, j);
    for (const auto& t : col.ts)
      if (t.comp < U.cols()) ts.push_back(t);
    MVec v = mvec_normalize(std::move(ts), *R.S);
    if (v.is_zero()) continue;
    rel.push_back(std::move(v));
    tw.push_back(K.src.tw[j]);
  }
  GradedMatrix P = matrix_from_columns(U.src, rel, tw);
  {
    std::vector<int> keep = minimal_column_set(P, R);
    std::vector<MVec> cols;
    std::vector<int> tw2;
    for (int j : keep) { cols.push_back(column_of(P, j)); tw2.push_back(P.src.tw[j]); }
    P = matrix_from_columns(U.src, cols, tw2);
  }
  return FPModule{R, std::move(P), U};
}

FPModule hom_module(const FPModule& M0, const FPModule& N0) {
  FPModule M = fp_minimize(M0), N = fp_minimize(N0);
  const RingCtx& R = M.R;
  const FreeMod &F0 = M.cover(), &F1 = M.pres.src;
  const FreeMod &G0 = N.cover(), &G1 = N.pres.src;

  auto hom_free = [&](const FreeMod& A, const FreeMod& B) {
    // Hom(A, B): generator (s,t) is the map a_t ↦ b_s, of degree tw_B[s]-tw_A[t]
    std::vector<int> tw;
    for (int s = 0; s < B.rank(); ++s)
      for (int t = 0; t < A.rank(); ++t) tw.push_back(B.tw[s] - A.tw[t]);
    return free_mod(R.S, tw);
  };
  auto slot = [&](const FreeMod& A, int s, int t) { return s * A.rank() + t; };

  FreeMod H0 = hom_free(F0, G0);
  FreeMod H1 = hom_free(F1, G0);
  FreeMod H2 = hom_free(F1, G1);

  // A: H0 -> H1, φ ↦ φ∘P_M ; B: H2 -> H1, ψ ↦ P_N∘ψ
  GradedMatrix A = zero_matrix(H0, H1);
  for (int s = 0; s < G0.rank(); ++s)
    for (int t = 0; t < F0.rank(); ++t)
      for (int c = 0; c < F1.rank(); ++c)
        A.e[slot(F1, s, c)][slot(F0, s, t)] = M.pres.e[t][c];
  GradedMatrix B = zero_matrix(H2, H1);
  for (int u = 0; u < G1.rank(); ++u)
    for (int c = 0; c < F1.rank(); ++c)
      for (int s = 0; s < G0.rank(); ++s)
        B.e[slot(F1, s, c)][slot(F1, u, c)] = N.pres.e[s][u];

  // lift pairs (φ,ψ) with φ∘P_M = P_N∘ψ
  FreeMod src = concat(H0, H2);
  GradedMatrix AB = zero_matrix(src, H1);
  for (int i = 0; i < H1.rank(); ++i) {
    for (int j = 0; j < H0.rank(); ++j) AB.e[i][j] = A.e[i][j];
    for (int j = 0; j < H2.rank(); ++j)
      AB.e[i][H0.rank() + j] = poly_neg(B.e[i][j]);
  }
  GradedMatrix K = kernel(AB, R);
  std::vector<MVec> ucols;
  std::vector<int> utw;
  for (int j = 0; j < K.cols(); ++j) {
    std::vector<MTerm> ts;
    MVec col = column_of(K, j);
    for (const auto& t : col.ts)
      if (t.comp < H0.rank()) ts.push_back(t);
    MVec v = mvec_normalize(std::move(ts), *R.S);
    if (v.is_zero()) continue;
    ucols.push_back(std::move(v));
    utw.push_back(K.src.tw[j]);
  }
  GradedMatrix U = matrix_from_columns(H0, ucols, utw);

  // trivial homs P_N∘ξ for ξ: F0 -> G1
  std::vector<MVec> vcols;
  std::vector<int> vtw;
  for (int u = 0; u < G1.rank(); ++u)
    for (int t = 0; t < F0.rank(); ++t) {
      std::vector<MTerm> ts;
      for (int s = 0; s < G0.rank(); ++s)
        for (const auto& tm : N.pres.e[s][u].ts)
          ts.push_back({slot(F0, s, t), tm});
      MVec v = mvec_normalize(std::move(ts), *R.S);
      if (v.is_zero()) continue;
      vcols.push_back(std::move(v));
      vtw.push_back(G1.tw[u] - F0.tw[t]);
    }
  GradedMatrix V = matrix_from_columns(H0, vcols, vtw);
  return subquotient(U, V, R);
}

FPModule ext_module(int i, const FPModule& M, int t) {
  if (M.R.is_quotient())
    throw std::invalid_argument("ext_module: defined over the polynomial ring");
  if (i < 0) throw std::invalid_argument("ext_module: negative index");
  const RingCtx& R = M.R;
  FreeResolution res = free_resolution(M.pres, i + 1, R);
  // F_k duals; d_k = steps[k-1]
  auto Fdual = [&](int k) -> FreeMod {
    if (k == 0) return dual_free(res.F0);
    return dual_free(res.steps[k - 1].src);
  };
  if (i > res.length()) return fp_free(R, {});
  GradedMatrix U = i < res.length()
                       ? syzygies(transpose(res.steps[i]), R)
                       : identity_matrix(Fdual(i));
  GradedMatrix V = i >= 1 ? transpose(res.steps[i - 1])
                          : zero_matrix(free_mod(R.S, {}), Fdual(0));
  FPModule E = subquotient(U, V, R);
  return fp_twist(E, t);
}

// --------------------------------------------------------------------------
// hom solving

namespace {

struct HomUnknowns {
  struct U {
    int s, t;
    Monomial m;
  };
  std::vector<U> list;
};

HomUnknowns hom_unknowns(const FreeMod& F0, const FreeMod& G0, const RingCtx& R) {
  HomUnknowns H;
  for (int s = 0; s < G0.rank(); ++s)
    for (int t = 0; t < F0.rank(); ++t)
      for (const auto& m : ring_basis(R, F0.tw[t] - G0.tw[s]))
        H.list.push_back({s, t, m});
  return H;
}

GradedMatrix hom_from_coords(const HomUnknowns& H, const std::vector<int64_t>& x,
                             const FreeMod& F0, const FreeMod& G0,
                             const RingCtx& R) {
  GradedMatrix Phi = zero_matrix(F0, G0);
  std::vector<std::vector<std::vector<Term>>> acc(
      G0.rank(), std::vector<std::vector<Term>>(F0.rank()));
  for (size_t u = 0; u < H.list.size(); ++u) {
    if (x[u] == 0) continue;
    acc[H.list[u].s][H.list[u].t].push_back({fp_norm(x[u], R.S->p), H.list[u].m});
  }
  for (int s = 0; s < G0.rank(); ++s)
    for (int t = 0; t < F0.rank(); ++t)
      Phi.e[s][t] = poly_from_terms(R.S, std::move(acc[s][t]));
  return Phi;
}

// rows expressing "Φ descends": for each relation column of P_M, the normal
// form of Φ·col against (im P_N + I_X·G0) must vanish
void descent_rows(const FPModule& M, const FPModule& N, const HomUnknowns& H,
                  std::vector<std::vector<int64_t>>& rows) {
  const RingCtx& R = M.R;
  const FreeMod& G0 = N.cover();
  std::vector<MVec> ngens;
  for (int j = 0; j < N.pres.cols(); ++j) ngens.push_back(column_of(N.pres, j));
  for (auto& v : ix_columns(G0, R)) ngens.push_back(std::move(v));
  ModGB gbN = module_gb(G0, ngens);

  RingCtx plainS = ring_ctx(R.S);
  for (int c = 0; c < M.pres.cols(); ++c) {
    int dc = M.pres.src.tw[c];
    // residues live in the degree-dc piece of G0 over S
    ModuleBasis basis = module_basis(G0, plainS, dc);
    std::vector<std::vector<int64_t>> cond(basis.size(),
                                           std::vector<int64_t>(H.list.size(), 0));
    for (size_t u = 0; u < H.list.size(); ++u) {
      const auto& un = H.list[u];
      const Poly& pmc = M.pres.e[un.t][c];
      if (pmc.is_zero()) continue;
      std::vector<MTerm> ts;
      for (const auto& tm : term_mul({1, un.m}, pmc).ts)
        ts.push_back({un.s, tm});
      MVec val = mvec_normalize(std::move(ts), *R.S);
      MVec nf = module_nf(val, gbN);
      if (nf.is_zero()) continue;
      auto coords = mvec_coords(nf, G0, plainS, basis);
      for (size_t b = 0; b < basis.size(); ++b)
        if (coords[b]) cond[b][u] = coords[b];
    }
    for (auto& row : cond) {
      bool nz = false;
      for (auto v : row) nz |= v != 0;
      if (nz) rows.push_back(std::move(row));
    }
  }
}

}  // namespace

std::vector<GradedMatrix> solve_homs(const FPModule& M, const FPModule& N) {
  const RingCtx& R = M.R;
  const FreeMod &F0 = M.cover(), &G0 = N.cover();
  HomUnknowns H = hom_unknowns(F0, G0, R);
  if (H.list.empty()) return {};
  std::vector<std::vector<int64_t>> rows;
  descent_rows(M, N, H, rows);
  FpMat A((int)rows.size(), (int)H.list.size(), R.S->p);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < H.list.size(); ++j) A.at((int)i, (int)j) = rows[i][j];
  FpMat ns = nullspace(A);
  std::vector<GradedMatrix> out;
  for (int j = 0; j < ns.cols; ++j) {
    std::vector<int64_t> x(H.list.size());
    for (size_t u = 0; u < H.list.size(); ++u) x[u] = ns.at((int)u, j);
    out.push_back(hom_from_coords(H, x, F0, G0, R));
  }
  return out;
}

std::optional<GradedMatrix> solve_hom_compat(const FPModule& M,
                                             const FPModule& N,
                                             const std::vector<Poly>& epsM,
                                             const std::vector<Poly>& epsN) {
  const RingCtx& R = M.R;
  const FreeMod &F0 = M.cover(), &G0 = N.cover();
  HomUnknowns H = hom_unknowns(F0, G0, R);
  std::vector<std::vector<int64_t>> rows;
  std::vector<int64_t> rhs;
  descent_rows(M, N, H, rows);
  rhs.assign(rows.size(), 0);

  // eps compatibility: Σ_s Φ_{s,t}·epsN[s] ≡ epsM[t] (mod I_X), per generator t
  for (int t = 0; t < F0.rank(); ++t) {
    Poly target = ctx_nf(epsM[t], R);
    int deg = target.is_zero() ? -1 : target.degree();
    // determine the common degree from labels when the target vanishes
    for (int s = 0; s < G0.rank() && deg < 0; ++s)
      if (!epsN[s].is_zero())
        deg = F0.tw[t] - G0.tw[s] + epsN[s].degree();
    if (deg < 0) continue;
    std::vector<Monomial> basis = monomials_of_degree(*R.S, deg);
    std::map<std::vector<uint16_t>, size_t> index;
    for (size_t i = 0; i < basis.size(); ++i) index[basis[i].e] = i;
    std::vector<std::vector<int64_t>> cond(basis.size(),
                                           std::vector<int64_t>(H.list.size(), 0));
    std::vector<int64_t> crhs(basis.size(), 0);
    for (size_t u = 0; u < H.list.size(); ++u) {
      const auto& un = H.list[u];
      if (un.t != t || epsN[un.s].is_zero()) continue;
      Poly f = ctx_nf(term_mul({1, un.m}, epsN[un.s]), R);
      for (const auto& tm : f.ts) cond[index[tm.m.e]][u] = tm.c;
    }
    for (const auto& tm : target.ts) crhs[index[tm.m.e]] = tm.c;
    for (size_t b = 0; b < basis.size(); ++b) {
      bool nz = crhs[b] != 0;
      for (auto v : cond[b]) nz |= v != 0;
      if (nz) { rows.push_back(std::move(cond[b])); rhs.push_back(crhs[b]); }
    }
  }

  FpMat A((int)rows.size(), (int)H.list.size(), R.S->p);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < H.list.size(); ++j) A.at((int)i, (int)j) = rows[i][j];
  auto x = solve(A, rhs);
  if (!x) return std::nullopt;
  return hom_from_coords(H, *x, F0, G0, R);
}

std::optional<GradedMatrix> solve_hom_with_images(const FPModule& M,
                                                  const FPModule& N,
                                                  const GradedMatrix& cols,
                                                  const GradedMatrix& target) {
  const RingCtx& R = M.R;
  const FreeMod &F0 = M.cover(), &G0 = N.cover();
  HomUnknowns H = hom_unknowns(F0, G0, R);
  std::vector<std::vector<int64_t>> rows;
  std::vector<int64_t> rhs;
  descent_rows(M, N, H, rows);
  rhs.assign(rows.size(), 0);

  std::vector<MVec> ngens;
  for (int j = 0; j < N.pres.cols(); ++j) ngens.push_back(column_of(N.pres, j));
  for (const auto& q : R.ix_gb)
    for (int i = 0; i < G0.rank(); ++i) {
      std::vector<MTerm> ts;
      for (const auto& t : q.ts) ts.push_back({i, t});
      ngens.push_back(mvec_normalize(std::move(ts), *R.S));
    }
  ModGB gbN = module_gb(G0, ngens);
  RingCtx plainS = ring_ctx(R.S);

  for (int c = 0; c < cols.cols(); ++c) {
    int dc = cols.src.tw[c];
    ModuleBasis basis = module_basis(G0, plainS, dc);
    std::vector<std::vector<int64_t>> cond(basis.size(),
                                           std::vector<int64_t>(H.list.size(), 0));
    std::vector<int64_t> crhs(basis.size(), 0);
    for (size_t u = 0; u < H.list.size(); ++u) {
      const auto& un = H.list[u];
      const Poly& entry = cols.e[un.t][c];
      if (entry.is_zero()) continue;
      std::vector<MTerm> ts;
      for (const auto& tm : term_mul({1, un.m}, entry).ts)
        ts.push_back({un.s, tm});
      MVec nf = module_nf(mvec_normalize(std::move(ts), *R.S), gbN);
      if (nf.is_zero()) continue;
      auto coords = mvec_coords(nf, G0, plainS, basis);
      for (size_t b = 0; b < basis.size(); ++b)
        if (coords[b]) cond[b][u] = coords[b];
    }
    {
      std::vector<MTerm> ts;
      for (int s = 0; s < G0.rank(); ++s)
        for (const auto& tm : target.e[s][c].ts) ts.push_back({s, tm});
      MVec nf = module_nf(mvec_normalize(std::move(ts), *R.S), gbN);
      auto coords = mvec_coords(nf, G0, plainS, basis);
      for (size_t b = 0; b < basis.size(); ++b) crhs[b] = coords[b];
    }
    for (size_t b = 0; b < basis.size(); ++b) {
      bool nz = crhs[b] != 0;
      for (auto v : cond[b]) nz |= v != 0;
      if (nz) { rows.push_back(std::move(cond[b])); rhs.push_back(crhs[b]); }
    }
  }

  FpMat A((int)rows.size(), (int)H.list.size(), R.S->p);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < H.list.size(); ++j) A.at((int)i, (int)j) = rows[i][j];
  auto x = solve(A, rhs);
  if (!x) return std::nullopt;
  return hom_from_coords(H, *x, F0, G0, R);
}

std::optional<SplitMaps> find_split(const FPModule& M, const FPModule& T,
                                    uint64_t seed) {
  std::vector<GradedMatrix> homs = solve_homs(T, M);
  if (homs.empty()) return std::nullopt;
  Rng rng(seed);
  GradedMatrix id = identity_matrix(T.cover());
  for (int trial = 0; trial < 10; ++trial) {
    GradedMatrix iota = homs[0];
    if (trial < (int)homs.size()) {
      iota = homs[trial];
    } else {
      for (auto& row : iota.e)
        for (auto& f : row) f = poly_zero(iota.src.ring);
      for (const auto& h : homs) {
        int64_t c = rng.uniform(M.R.S->p);
        for (int i = 0; i < iota.rows(); ++i)
          for (int j = 0; j < iota.cols(); ++j)
            iota.e[i][j] = poly_add(iota.e[i][j], poly_scale(h.e[i][j], c));
      }
    }
    auto pi = solve_hom_with_images(M, T, iota, id);
    if (pi) return SplitMaps{iota, *pi};
  }
  return std::nullopt;
}

// --------------------------------------------------------------------------
// MCM test, free summands, stable comparison

int pd_over_S(const FPModule& M) {
  const RingCtx& R = M.R;
  RingCtx plainS = ring_ctx(R.S);
  FreeMod F0 = M.cover();
  std::vector<MVec> cols;
  std::vector<int> tw;
  for (int j = 0; j < M.pres.cols(); ++j) {
    cols.push_back(column_of(M.pres, j));
    tw.push_back(M.pres.src.tw[j]);
  }
  for (const auto& q : R.ix_gb)
    for (int i = 0; i < F0.rank(); ++i) {
      std::vector<MTerm> ts;
      for (const auto& t : q.ts) ts.push_back({i, t});
      cols.push_back(mvec_normalize(std::move(ts), *R.S));
      tw.push_back(q.degree() + F0.tw[i]);
    }
  GradedMatrix P = matrix_from_columns(F0, cols, tw);
  FreeResolution res = free_resolution(P, (int)R.S->nvars() + 1, plainS);
  return res.length();
}

bool is_MCM(const FPModule& M) {
  if (fp_is_zero(M)) return false;
  int codim = (int)M.R.S->nvars() - ctx_krull(M.R);
  return pd_over_S(M) == codim;
}

StripResult strip_free(const FPModule& M) {
  StripResult out{fp_minimize(M), {}};
  for (;;) {
    const FPModule& cur = out.m0;
    if (cur.cover().rank() == 0) break;
    std::vector<int> tws = cur.cover().tw;
    std::sort(tws.begin(), tws.end());
    tws.erase(std::unique(tws.begin(), tws.end()), tws.end());
    bool stripped = false;
    for (int a : tws) {
      FPModule target = fp_free(cur.R, {a});
      std::vector<GradedMatrix> homs = solve_homs(cur, target);
      // look for a hom with a unit value on some generator of degree a
      for (const auto& Phi : homs) {
        int witness = -1;
        for (int t = 0; t < cur.cover().rank() && witness < 0; ++t)
          if (cur.cover().tw[t] == a && Phi.e[0][t].is_constant()) witness = t;
        if (witness < 0) continue;
        // split off R(-a) generated by the witness generator
        GradedMatrix P = cur.pres;
        FreeMod src = P.src;
        src.tw.push_back(a);
        GradedMatrix P2 = zero_matrix(src, P.dst);
        for (int i = 0; i < P.rows(); ++i)
          for (int j = 0; j < P.cols(); ++j) P2.e[i][j] = P.e[i][j];
        P2.e[witness][P.cols()] = poly_const(cur.R.S, 1);
        out.free_twists.push_back(a);
        out.m0 = fp_minimize(FPModule{cur.R, std::move(P2), std::nullopt});
        stripped = true;
        break;
      }
      if (stripped) break;
    }
    if (!stripped) break;
  }
  std::sort(out.free_twists.begin(), out.free_twists.end());
  return out;
}

namespace {

bool generator_matrix_invertible(const GradedMatrix& Phi) {
  // constant parts between equal-degree generators
  int n = Phi.rows();
  if (n != Phi.cols()) return false;
  FpMat G(n, n, Phi.src.ring->p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!Phi.e[i][j].is_zero() && Phi.e[i][j].is_constant())
        G.at(i, j) = Phi.e[i][j].lt().c;
  return rank_of(G) == n;
}

std::optional<GradedMatrix> find_unit_hom(const std::vector<GradedMatrix>& homs,
                                          Rng& rng, int64_t p) {
  for (const auto& Phi : homs)
    if (generator_matrix_invertible(Phi)) return Phi;
  if (homs.empty()) return std::nullopt;
  for (int trial = 0; trial < 24; ++trial) {
    GradedMatrix Phi = homs[0];
    for (auto& row : Phi.e)
      for (auto& f : row) f = poly_zero(Phi.src.ring);
    for (const auto& h : homs) {
      int64_t c = rng.uniform(p);
      for (int i = 0; i < Phi.rows(); ++i)
        for (int j = 0; j < Phi.cols(); ++j)
          Phi.e[i][j] = poly_add(Phi.e[i][j], poly_scale(h.e[i][j], c));
    }
    if (generator_matrix_invertible(Phi)) return Phi;
  }
  return std::nullopt;
}

}  // namespace

bool fp_isomorphic(const FPModule& M0, const FPModule& N0, uint64_t seed) {
  FPModule M = fp_minimize(M0), N = fp_minimize(N0);
  auto twm = M.cover().tw, twn = N.cover().tw;
  std::sort(twm.begin(), twm.end());
  std::sort(twn.begin(), twn.end());
  if (twm != twn) return false;
  if (twm.empty()) return true;
  Rng rng(seed);
  auto fwd = find_unit_hom(solve_homs(M, N), rng, M.R.S->p);
  if (!fwd) return false;
  auto bwd = find_unit_hom(solve_homs(N, M), rng, M.R.S->p);
  return bwd.has_value();
}

StableCompareResult stable_compare(const FPModule& M, const FPModule& N,
                                   uint64_t seed) {
  StripResult sm = strip_free(M), sn = strip_free(N);
  FPModule M0 = sm.m0, N0 = sn.m0;
  bool zm = M0.cover().rank() == 0, zn = N0.cover().rank() == 0;
  if (zm && zn) return {CompareVerdict::Equal, 0};
  if (zm != zn) return {CompareVerdict::Differ, 0};
  // candidate shift pinned by minimal generator degrees: N0 ≅ M0(s)
  auto twm = M0.cover().tw, twn = N0.cover().tw;
  std::sort(twm.begin(), twm.end());
  std::sort(twn.begin(), twn.end());
  if (twm.size() != twn.size()) return {CompareVerdict::Differ, 0};
  int s = twm[0] - twn[0];
  for (size_t i = 0; i < twm.size(); ++i)
    if (twm[i] - twn[i] != s) return {CompareVerdict::Differ, 0};
  auto b1m = M0.pres.src.tw, b1n = N0.pres.src.tw;
  std::sort(b1m.begin(), b1m.end());
  std::sort(b1n.begin(), b1n.end());
  if (b1m.size() != b1n.size()) return {CompareVerdict::Differ, 0};
  for (size_t i = 0; i < b1m.size(); ++i)
    if (b1m[i] - b1n[i] != s) return {CompareVerdict::Differ, 0};
  // Hilbert check in a window
  int lo = twn[0], hi = twn.back() + 6;
  for (int d = lo; d <= hi; ++d)
    if (fp_hf(N0, d) != fp_hf(fp_twist(M0, s), d))
      return {CompareVerdict::Differ, 0};
  if (fp_isomorphic(fp_twist(M0, s), N0, seed)) return {CompareVerdict::Equal, s};
  return {CompareVerdict::Undecided, s};
}

// --------------------------------------------------------------------------
// finite length modules

FiniteLengthModule to_finite_length(const FPModule& M0) {
  FPModule M = fp_minimize(M0);
  const RingCtx& R = M.R;
  FiniteLengthModule F;
  F.p = R.S->p;
  F.nvars = (int)R.S->nvars();
  if (M.cover().rank() == 0) { F.dmin = 0; return F; }
  int dmin = M.cover().tw[0], gmax = M.cover().tw[0];
  for (int t : M.cover().tw) { dmin = std::min(dmin, t); gmax = std::max(gmax, t); }
  F.dmin = dmin;

  const int scan_limit = dmin + 80;
  struct DegData {
    ModuleBasis basis;
    EchelonSpan span{0, 2};
    std::vector<int> free_coords;
  };
  std::vector<DegData> data;

  auto piece = [&](int d) {
    DegData dd;
    dd.basis = module_basis(M.cover(), R, d);
    dd.span = EchelonSpan((int)dd.basis.size(), F.p);
    for (int j = 0; j < M.pres.cols(); ++j) {
      int gd = M.pres.src.tw[j];
      if (gd > d) continue;
      MVec col = column_of(M.pres, j);
      for (const auto& m : ring_basis(R, d - gd))
        dd.span.add(mvec_coords(mvec_term_mul({1, m}, col, *R.S), M.cover(), R,
                                dd.basis));
    }
    std::vector<bool> is_piv(dd.basis.size(), false);
    for (int c : dd.span.piv) is_piv[c] = true;
    for (size_t c = 0; c < dd.basis.size(); ++c)
      if (!is_piv[c]) dd.free_coords.push_back((int)c);
    return dd;
  };

  int d = dmin;
  for (;; ++d) {
    if (d > scan_limit)
      throw LimitError("to_finite_length: window detection failed "
                       "(module may not have finite length)");
    data.push_back(piece(d));
    int dim = (int)data.back().free_coords.size();
    F.dims.push_back(dim);
    if (d >= gmax && dim == 0) break;
  }
  while (!F.dims.empty() && F.dims.back() == 0) {
    F.dims.pop_back();
    data.pop_back();
  }
  if (F.dims.empty()) { F.dims.clear(); F.mult.clear(); return F; }

  F.mult.assign(F.nvars, {});
  for (int v = 0; v < F.nvars; ++v) {
    for (size_t k = 0; k + 1 < F.dims.size() + 1; ++k) {
      int rows = k + 1 < F.dims.size() ? F.dims[k + 1] : 0;
      if (k + 1 >= F.dims.size()) break;
      FpMat mat(rows, F.dims[k], F.p);
      for (int col = 0; col < F.dims[k]; ++col) {
        std::vector<int64_t> coords(data[k].basis.size(), 0);
        coords[data[k].free_coords[col]] = 1;
        MVec rep = mvec_from_coords(coords, data[k].basis, *R.S);
        MVec xr = mvec_term_mul({1, mono_var(R.S->nvars(), v)}, rep, *R.S);
        auto c2 = mvec_coords(xr, M.cover(), R, data[k + 1].basis);
        data[k + 1].span.reduce(c2);
        for (int row = 0; row < rows; ++row)
          mat.at(row, col) = c2[data[k + 1].free_coords[row]];
      }
      F.mult[v].push_back(std::move(mat));
    }
  }
  return F;
}

FiniteLengthModule graded_dual(const FiniteLengthModule& M) {
  FiniteLengthModule D;
  D.p = M.p;
  D.nvars = M.nvars;
  int K = (int)M.dims.size();
  if (K == 0) { D.dmin = 0; return D; }
  D.dmin = -(M.dmin + K - 1);
  D.dims.resize(K);
  for (int k = 0; k < K; ++k) D.dims[k] = M.dims[K - 1 - k];
  D.mult.assign(M.nvars, {});
  for (int v = 0; v < M.nvars; ++v)
    for (int k = 0; k + 1 < K; ++k) {
      const FpMat& src = M.mult[v][K - 2 - k];  // M_{k'} -> M_{k'+1}
      FpMat t(src.cols, src.rows, M.p);
      for (int i = 0; i < src.rows; ++i)
        for (int j = 0; j < src.cols; ++j) t.at(j, i) = src.at(i, j);
      D.mult[v].push_back(std::move(t));
    }
  return D;
}

namespace {

FiniteLengthModule flm_trim(const FiniteLengthModule& M) {
  FiniteLengthModule T = M;
  while (!T.dims.empty() && T.dims.front() == 0) {
    T.dims.erase(T.dims.begin());
    for (auto& mv : T.mult)
      if (!mv.empty()) mv.erase(mv.begin());
    ++T.dmin;
  }
  while (!T.dims.empty() && T.dims.back() == 0) {
    T.dims.pop_back();
    for (auto& mv : T.mult)
      if (!mv.empty()) mv.pop_back();
  }
  if (T.dims.empty()) { T.dmin = 0; T.mult.clear(); }
  return T;
}

}  // namespace

bool flm_equal(const FiniteLengthModule& A0, const FiniteLengthModule& B0) {
  FiniteLengthModule A = flm_trim(A0), B = flm_trim(B0);
  if (A.dmin != B.dmin || A.dims != B.dims) return false;
  if (A.is_zero()) return true;
  for (size_t v = 0; v < A.mult.size(); ++v)
    for (size_t k = 0; k < A.mult[v].size(); ++k)
      if (A.mult[v][k].a != B.mult[v][k].a) return false;
  return true;
}

std::optional<int> flm_iso_up_to_twist(const FiniteLengthModule& A0,
                                       const FiniteLengthModule& B0,
                                       uint64_t seed) {
  FiniteLengthModule A = flm_trim(A0), B = flm_trim(B0);
  if (A.is_zero() && B.is_zero()) return 0;
  if (A.is_zero() != B.is_zero()) return std::nullopt;
  if (A.dims != B.dims) return std::nullopt;
  int shift = A.dmin - B.dmin;  // B ≅ A(shift)
  int K = (int)A.dims.size();
  // unknown block maps T_k: B_k -> A_k with T_{k+1}∘multB = multA∘T_k
  std::vector<int> offset(K + 1, 0);
  for (int k = 0; k < K; ++k) offset[k + 1] = offset[k] + A.dims[k] * A.dims[k];
  int nun = offset[K];
  std::vector<std::vector<int64_t>> rows;
  for (int v = 0; v < A.nvars; ++v)
    for (int k = 0; k + 1 < K; ++k) {
      const FpMat& Bm = B.mult[v][k];
      const FpMat& Am = A.mult[v][k];
      // entry (i,j): Σ_l T_{k+1}[i][l]·Bm[l][j] − Σ_l Am[i][l]·T_k[l][j] = 0
      for (int i = 0; i < A.dims[k + 1]; ++i)
        for (int j = 0; j < A.dims[k]; ++j) {
          std::vector<int64_t> row(nun, 0);
          for (int l = 0; l < A.dims[k + 1]; ++l)
            row[offset[k + 1] + i * A.dims[k + 1] + l] =
                fp_add(row[offset[k + 1] + i * A.dims[k + 1] + l], Bm.at(l, j), A.p);
          for (int l = 0; l < A.dims[k]; ++l)
            row[offset[k] + l * A.dims[k] + j] = fp_sub(
                row[offset[k] + l * A.dims[k] + j], Am.at(i, l), A.p);
          rows.push_back(std::move(row));
        }
    }
  FpMat C((int)rows.size(), nun, A.p);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < nun; ++j) C.at((int)i, j) = rows[i][j];
  FpMat ns = nullspace(C);
  if (ns.cols == 0) return std::nullopt;
  Rng rng(seed);
  auto blocks_invertible = [&](const std::vector<int64_t>& x) {
    for (int k = 0; k < K; ++k) {
      int n = A.dims[k];
      FpMat T(n, n, A.p);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T.at(i, j) = x[offset[k] + i * n + j];
      if (rank_of(T) != n) return false;
    }
    return true;
  };
  for (int j = 0; j < ns.cols; ++j) {
    std::vector<int64_t> x(nun, 0);
    for (int u = 0; u < nun; ++u) x[u] = ns.at(u, j);
    if (blocks_invertible(x)) return shift;
  }
  for (int trial = 0; trial < 32; ++trial) {
    std::vector<int64_t> x(nun, 0);
    for (int j = 0; j < ns.cols; ++j) {
      int64_t c = rng.uniform(A.p);
      for (int u = 0; u < nun; ++u)
        x[u] = fp_add(x[u], fp_mul(c, ns.at(u, j), A.p), A.p);
    }
    if (blocks_invertible(x)) return shift;
  }
  return std::nullopt;
}

}  // namespace gliaison
