#include "gliaison/modules.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace gliaison {

Caps& default_caps() {
  static Caps caps;
  return caps;
}

FreeMod free_mod(RingPtr R, std::vector<int> tw) {
  return FreeMod{std::move(R), std::move(tw)};
}

FreeMod dual_free(const FreeMod& F) {
  FreeMod D = F;
  for (auto& t : D.tw) t = -t;
  return D;
}

FreeMod concat(const FreeMod& A, const FreeMod& B) {
  FreeMod C = A;
  C.tw.insert(C.tw.end(), B.tw.begin(), B.tw.end());
  return C;
}

bool mterm_less(const MTerm& a, const MTerm& b, const PolyRing& R) {
  if (a.comp != b.comp) return a.comp > b.comp;  // lower component dominates
  return mono_less(a.t.m, b.t.m, R);
}

MVec mvec_normalize(std::vector<MTerm> ts, const PolyRing& R) {
  std::sort(ts.begin(), ts.end(), [&](const MTerm& a, const MTerm& b) {
    return mterm_less(b, a, R);  // descending
  });
  std::vector<MTerm> out;
  for (auto& t : ts) {
    int64_t c = fp_norm(t.t.c, R.p);
    if (!out.empty() && out.back().comp == t.comp && out.back().t.m == t.t.m) {
      out.back().t.c = fp_add(out.back().t.c, c, R.p);
      if (out.back().t.c == 0) out.pop_back();
    } else if (c != 0) {
      out.push_back({t.comp, {c, t.t.m}});
    }
  }
  return MVec{std::move(out)};
}

MVec mvec_add(const MVec& a, const MVec& b, const PolyRing& R) {
  std::vector<MTerm> out;
  out.reserve(a.ts.size() + b.ts.size());
  size_t i = 0, j = 0;
  while (i < a.ts.size() && j < b.ts.size()) {
    const MTerm& x = a.ts[i];
    const MTerm& y = b.ts[j];
    if (x.comp == y.comp && x.t.m == y.t.m) {
      int64_t c = fp_add(x.t.c, y.t.c, R.p);
      if (c) out.push_back({x.comp, {c, x.t.m}});
      ++i; ++j;
    } else if (mterm_less(y, x, R)) {
      out.push_back(x); ++i;
    } else {
      out.push_back(y); ++j;
    }
  }
  while (i < a.ts.size()) out.push_back(a.ts[i++]);
  while (j < b.ts.size()) out.push_back(b.ts[j++]);
  return MVec{std::move(out)};
}

MVec mvec_scale(const MVec& a, int64_t c, const PolyRing& R) {
  c = fp_norm(c, R.p);
  if (c == 0) return MVec{};
  MVec r = a;
  for (auto& t : r.ts) t.t.c = fp_mul(t.t.c, c, R.p);
  return r;
}

MVec mvec_sub(const MVec& a, const MVec& b, const PolyRing& R) {
  return mvec_add(a, mvec_scale(b, R.p - 1, R), R);
}

MVec mvec_term_mul(const Term& t, const MVec& a, const PolyRing& R) {
  MVec r;
  r.ts.reserve(a.ts.size());
  for (const auto& s : a.ts)
    r.ts.push_back({s.comp, {fp_mul(s.t.c, t.c, R.p), mono_mul(s.t.m, t.m)}});
  return r;
}

MVec mvec_unit(size_t n, int comp, RingPtr R) {
  (void)n;
  MVec v;
  v.ts.push_back({comp, {1, mono_one(R->nvars())}});
  return v;
}

bool mvec_is_homogeneous(const MVec& v, const FreeMod& F) {
  if (v.is_zero()) return true;
  int d = v.ts.front().t.m.deg() + F.tw[v.ts.front().comp];
  for (const auto& t : v.ts)
    if (t.t.m.deg() + F.tw[t.comp] != d) return false;
  return true;
}

int mvec_degree(const MVec& v, const FreeMod& F) {
  if (v.is_zero()) return -1;
  if (!mvec_is_homogeneous(v, F))
    throw std::logic_error("mvec_degree: inhomogeneous element");
  return v.ts.front().t.m.deg() + F.tw[v.ts.front().comp];
}

GradedMatrix zero_matrix(const FreeMod& src, const FreeMod& dst) {
  GradedMatrix M{src, dst, {}};
  M.e.assign(dst.tw.size(), std::vector<Poly>(src.tw.size(), poly_zero(src.ring)));
  return M;
}

GradedMatrix identity_matrix(const FreeMod& F) {
  GradedMatrix M = zero_matrix(F, F);
  for (int i = 0; i < F.rank(); ++i) M.e[i][i] = poly_const(F.ring, 1);
  return M;
}

void check_graded(const GradedMatrix& M) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      const Poly& f = M.e[i][j];
      if (f.is_zero()) continue;
      if (!f.is_homogeneous())
        throw std::logic_error("matrix entry not homogeneous");
      if (f.degree() != M.src.tw[j] - M.dst.tw[i])
        throw std::logic_error("matrix entry has wrong degree for its labels");
    }
}

GradedMatrix transpose(const GradedMatrix& M) {
  GradedMatrix T{dual_free(M.dst), dual_free(M.src), {}};
  T.e.assign(M.cols(), std::vector<Poly>(M.rows(), poly_zero(M.src.ring)));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) T.e[j][i] = M.e[i][j];
  return T;
}

GradedMatrix compose(const GradedMatrix& A, const GradedMatrix& B) {
  if (A.src.tw != B.dst.tw)
    throw std::logic_error("compose: label mismatch");
  GradedMatrix C = zero_matrix(B.src, A.dst);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) {
      Poly acc = poly_zero(A.src.ring);
      for (int l = 0; l < A.cols(); ++l)
        acc = poly_add(acc, poly_mul(A.e[i][l], B.e[l][j]));
      C.e[i][j] = acc;
    }
  return C;
}

GradedMatrix twist_matrix(const GradedMatrix& M, int a) {
  GradedMatrix T = M;
  for (auto& t : T.src.tw) t -= a;
  for (auto& t : T.dst.tw) t -= a;
  return T;
}

bool matrix_is_zero(const GradedMatrix& M) {
  for (const auto& row : M.e)
    for (const auto& f : row)
      if (!f.is_zero()) return false;
  return true;
}

MVec column_of(const GradedMatrix& M, int j) {
  std::vector<MTerm> ts;
  for (int i = 0; i < M.rows(); ++i)
    for (const auto& t : M.e[i][j].ts) ts.push_back({i, t});
  return mvec_normalize(std::move(ts), *M.src.ring);
}

GradedMatrix matrix_from_columns(const FreeMod& dst,
                                 const std::vector<MVec>& cols,
                                 const std::vector<int>& col_tw) {
  GradedMatrix M = zero_matrix(free_mod(dst.ring, col_tw), dst);
  for (size_t j = 0; j < cols.size(); ++j) {
    std::vector<std::vector<Term>> per_row(dst.tw.size());
    for (const auto& t : cols[j].ts) per_row[t.comp].push_back(t.t);
    for (size_t i = 0; i < per_row.size(); ++i)
      M.e[i][j] = poly_from_terms(dst.ring, std::move(per_row[i]));
  }
  return M;
}

// --------------------------------------------------------------------------
// polynomial normal form against a basis list

Poly poly_nf(const Poly& f, const std::vector<Poly>& gb) {
  if (gb.empty()) return f;
  const RingPtr R = f.ring;
  const int64_t p = R->p;
  Poly rem = f;
  std::vector<Term> out;
  while (!rem.is_zero()) {
    bool reduced = false;
    for (const auto& g : gb) {
      if (g.is_zero()) continue;
      if (mono_divides(g.lt().m, rem.lt().m)) {
        Term t{fp_div(rem.lt().c, g.lt().c, p), mono_div(rem.lt().m, g.lt().m)};
        rem = poly_sub(rem, term_mul(t, g));
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      out.push_back(rem.lt());
      rem.ts.erase(rem.ts.begin());
    }
  }
  return Poly{R, std::move(out)};
}

// --------------------------------------------------------------------------
// module Buchberger

namespace {

struct GBWork {
  const FreeMod& F;
  const PolyRing& R;
  bool track;
  std::vector<MVec> g;                  // current basis
  std::vector<std::vector<Poly>> rep;   // g[i] = Σ rep[i][j]·input[j]
  std::vector<bool> single_comp;        // all terms in one component

  GBWork(const FreeMod& F_) : F(F_), R(*F_.ring), track(false) {}

  bool one_component(const MVec& v) const {
    for (const auto& t : v.ts)
      if (t.comp != v.ts.front().comp) return false;
    return true;
  }

  // full normal form; accumulates reduction coefficients into acc if tracking
  MVec reduce_full(MVec v, std::vector<Poly>* acc) const {
    std::vector<MTerm> out;
    while (!v.is_zero()) {
      const MTerm& lt = v.lt();
      int hit = -1;
      for (size_t k = 0; k < g.size(); ++k) {
        if (g[k].is_zero()) continue;
        const MTerm& gl = g[k].lt();
        if (gl.comp == lt.comp && mono_divides(gl.t.m, lt.t.m)) { hit = (int)k; break; }
      }
      if (hit < 0) {
        out.push_back(lt);
        v.ts.erase(v.ts.begin());
        continue;
      }
      Term t{fp_div(lt.t.c, g[hit].lt().t.c, R.p), mono_div(lt.t.m, g[hit].lt().t.m)};
      v = mvec_sub(v, mvec_term_mul(t, g[hit], R), R);
      if (acc) {
        Poly tp = poly_from_terms(F.ring, {t});
        for (size_t j = 0; j < acc->size(); ++j)
          (*acc)[j] = poly_add((*acc)[j], poly_mul(tp, rep[hit][j]));
      }
    }
    // out is already in descending order
    return MVec{std::move(out)};
  }
};

struct Pair {
  int deg;
  int i, j;
  bool operator<(const Pair& o) const {
    if (deg != o.deg) return deg < o.deg;
    if (j != o.j) return j < o.j;
    return i < o.i;
  }
};

}  // namespace

ModGB module_gb(const FreeMod& F, const std::vector<MVec>& gens,
                bool track_rep, const Caps& caps) {
  GBWork w(F);
  w.track = track_rep;
  const PolyRing& R = w.R;
  const size_t n_in = gens.size();

  std::set<Pair> pairs;
  long pair_budget = caps.max_pairs;

  auto add_elem = [&](MVec v, std::vector<Poly> r) {
    int64_t lc = v.lt().t.c;
    if (lc != 1) {
      int64_t inv = fp_inv(lc, R.p);
      v = mvec_scale(v, inv, R);
      if (w.track)
        for (auto& f : r) f = poly_scale(f, inv);
    }
    int idx = (int)w.g.size();
    for (int k = 0; k < idx; ++k) {
      if (w.g[k].is_zero()) continue;
      if (w.g[k].lt().comp != v.lt().comp) continue;
      Monomial L = mono_lcm(w.g[k].lt().t.m, v.lt().t.m);
      // product criterion, valid when both live in a single component
      if (w.single_comp[k] && w.one_component(v) &&
          mono_coprime(w.g[k].lt().t.m, v.lt().t.m))
        continue;
      int d = L.deg() + F.tw[v.lt().comp];
      pairs.insert({d, k, idx});
    }
    w.single_comp.push_back(w.one_component(v));
    w.g.push_back(std::move(v));
    w.rep.push_back(std::move(r));
  };

  for (size_t j = 0; j < n_in; ++j) {
    if (gens[j].is_zero()) continue;
    if (!mvec_is_homogeneous(gens[j], F))
      throw std::invalid_argument("module_gb: inhomogeneous generator");
    std::vector<Poly> r;
    if (track_rep) r.assign(n_in, poly_zero(F.ring));
    MVec nf = w.reduce_full(gens[j], track_rep ? &r : nullptr);
    if (nf.is_zero()) continue;
    if (track_rep) {  // gen_j = nf + Σ r·inputs, so nf = Σ (δ_j - r)·inputs
      for (auto& f : r) f = poly_neg(f);
      r[j] = poly_add(r[j], poly_const(F.ring, 1));
    }
    add_elem(std::move(nf), std::move(r));
  }

  while (!pairs.empty()) {
    Pair pr = *pairs.begin();
    pairs.erase(pairs.begin());
    if (pr.deg > caps.max_pair_degree)
      throw LimitError("S-pair degree cap exceeded (" +
                       std::to_string(pr.deg) + " > " +
                       std::to_string(caps.max_pair_degree) + ")");
    if (--pair_budget < 0) throw LimitError("S-pair count cap exceeded");

    const MVec& gi = w.g[pr.i];
    const MVec& gj = w.g[pr.j];
    Monomial L = mono_lcm(gi.lt().t.m, gj.lt().t.m);
    // chain criterion, strict form: both side lcms must properly divide L,
    // so each application decreases the lcm and no circular skipping occurs
    {
      bool skip = false;
      for (size_t k = 0; k < w.g.size() && !skip; ++k) {
        if ((int)k == pr.i || (int)k == pr.j || w.g[k].is_zero()) continue;
        if (w.g[k].lt().comp != gi.lt().comp) continue;
        const Monomial& mk = w.g[k].lt().t.m;
        if (!mono_divides(mk, L)) continue;
        Monomial lik = mono_lcm(gi.lt().t.m, mk);
        Monomial ljk = mono_lcm(gj.lt().t.m, mk);
        if (!(lik == L) && !(ljk == L)) skip = true;
      }
      if (skip) continue;
    }

    Term ti{1, mono_div(L, gi.lt().t.m)};
    Term tj{1, mono_div(L, gj.lt().t.m)};
    MVec s = mvec_sub(mvec_term_mul(ti, gi, R), mvec_term_mul(tj, gj, R), R);
    std::vector<Poly> r;
    if (track_rep) {
      r.assign(n_in, poly_zero(F.ring));
      Poly pi = poly_from_terms(F.ring, {ti});
      Poly pj = poly_from_terms(F.ring, {tj});
      for (size_t l = 0; l < n_in; ++l)
        r[l] = poly_sub(poly_mul(pi, w.rep[pr.i][l]), poly_mul(pj, w.rep[pr.j][l]));
    }
    std::vector<Poly> acc;
    if (track_rep) acc.assign(n_in, poly_zero(F.ring));
    MVec nf = w.reduce_full(std::move(s), track_rep ? &acc : nullptr);
    if (nf.is_zero()) continue;
    if (track_rep)
      for (size_t l = 0; l < n_in; ++l) r[l] = poly_sub(r[l], acc[l]);
    add_elem(std::move(nf), std::move(r));
  }

  // inter-reduce to the unique reduced basis
  std::vector<bool> alive(w.g.size(), true);
  for (size_t i = 0; i < w.g.size(); ++i) {
    for (size_t j = 0; j < w.g.size(); ++j) {
      if (i == j || !alive[i] || !alive[j]) continue;
      const MTerm &li = w.g[i].lt(), &lj = w.g[j].lt();
      if (li.comp == lj.comp && mono_divides(lj.t.m, li.t.m)) {
        if (li.t.m == lj.t.m && i < j) continue;  // keep the earlier one
        alive[i] = false;
        break;
      }
    }
  }

  ModGB out;
  out.F = F;
  out.has_rep = track_rep;
  std::vector<size_t> order;
  for (size_t i = 0; i < w.g.size(); ++i)
    if (alive[i]) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return mterm_less(w.g[b].lt(), w.g[a].lt(), R);
  });

  // tail reduction against the other survivors
  for (size_t oi : order) {
    MVec head{{w.g[oi].lt()}};
    MVec tail = w.g[oi];
    tail.ts.erase(tail.ts.begin());
    GBWork wr(F);
    wr.track = track_rep;
    for (size_t oj : order) {
      wr.g.push_back(w.g[oj]);
      wr.single_comp.push_back(w.single_comp[oj]);
      if (track_rep) wr.rep.push_back(w.rep[oj]);
    }
    std::vector<Poly> acc;
    if (track_rep) acc.assign(n_in, poly_zero(F.ring));
    MVec red = wr.reduce_full(std::move(tail), track_rep ? &acc : nullptr);
    out.g.push_back(mvec_add(head, red, R));
    if (track_rep) {
      std::vector<Poly> r = w.rep[oi];
      for (size_t l = 0; l < n_in; ++l) r[l] = poly_sub(r[l], acc[l]);
      out.rep.push_back(std::move(r));
    }
  }
  return out;
}

MVec module_nf(const MVec& v, const ModGB& gb, std::vector<Poly>* rep_out) {
  GBWork w(gb.F);
  w.track = rep_out != nullptr;
  if (rep_out && !gb.has_rep)
    throw std::logic_error("module_nf: basis has no representation data");
  w.g = gb.g;
  w.rep = gb.rep;
  for (const auto& e : gb.g) w.single_comp.push_back(w.one_component(e));
  std::vector<Poly> acc;
  size_t n_in = gb.rep.empty() ? 0 : gb.rep[0].size();
  if (rep_out) acc.assign(n_in, poly_zero(gb.F.ring));
  MVec r = w.reduce_full(v, rep_out ? &acc : nullptr);
  if (rep_out) *rep_out = std::move(acc);
  return r;
}

// --------------------------------------------------------------------------
// ring context

RingCtx ring_ctx(RingPtr S) { return RingCtx{std::move(S), {}, {}}; }

RingCtx ring_ctx(RingPtr S, std::vector<Poly> ix) {
  RingCtx R{std::move(S), std::move(ix), {}};
  if (!R.ix_gens.empty()) {
    FreeMod F = free_mod(R.S, {0});
    std::vector<MVec> gens;
    for (const auto& f : R.ix_gens) {
      MVec v;
      for (const auto& t : f.ts) v.ts.push_back({0, t});
      gens.push_back(std::move(v));
    }
    ModGB gb = module_gb(F, gens);
    for (const auto& g : gb.g) {
      std::vector<Term> ts;
      for (const auto& t : g.ts) ts.push_back(t.t);
      R.ix_gb.push_back(poly_from_terms(R.S, std::move(ts)));
    }
  }
  return R;
}

Poly ctx_nf(const Poly& f, const RingCtx& R) {
  if (!R.is_quotient()) return f;
  return poly_nf(f, R.ix_gb);
}

GradedMatrix kernel(const GradedMatrix& M, const RingCtx& R, const Caps& caps) {
  const int r = M.rows(), c = M.cols();
  FreeMod H = concat(M.dst, M.src);
  std::vector<MVec> gens;
  for (int j = 0; j < c; ++j) {
    std::vector<MTerm> ts;
    for (int i = 0; i < r; ++i)
      for (const auto& t : M.e[i][j].ts) ts.push_back({i, t});
    ts.push_back({r + j, {1, mono_one(M.src.ring->nvars())}});
    gens.push_back(mvec_normalize(std::move(ts), *M.src.ring));
  }
  for (const auto& q : R.ix_gb) {
    for (int i = 0; i < r; ++i) {
      std::vector<MTerm> ts;
      for (const auto& t : q.ts) ts.push_back({i, t});
      gens.push_back(mvec_normalize(std::move(ts), *M.src.ring));
    }
  }
  ModGB gb = module_gb(H, gens, false, caps);

  std::vector<MVec> cols;
  std::vector<int> tw;
  for (const auto& g : gb.g) {
    if (g.is_zero() || g.lt().comp < r) continue;
    // element lives purely in the source block: a kernel generator
    std::vector<MTerm> ts;
    for (const auto& t : g.ts) ts.push_back({t.comp - r, t.t});
    MVec v = mvec_normalize(std::move(ts), *M.src.ring);
    if (R.is_quotient()) {
      // reduce coordinates mod I_X; drop when trivial over the quotient
      std::vector<MTerm> red;
      for (int i = 0; i < c; ++i) {
        std::vector<Term> comp_ts;
        for (const auto& t : v.ts)
          if (t.comp == i) comp_ts.push_back(t.t);
        Poly f = ctx_nf(poly_from_terms(M.src.ring, std::move(comp_ts)), R);
        for (const auto& t : f.ts) red.push_back({i, t});
      }
      v = mvec_normalize(std::move(red), *M.src.ring);
      if (v.is_zero()) continue;
    }
    tw.push_back(mvec_degree(v, M.src));
    cols.push_back(std::move(v));
  }
  return matrix_from_columns(M.src, cols, tw);
}

std::optional<std::vector<Poly>> lift_through(const GradedMatrix& G,
                                              const MVec& v, const RingCtx& R,
                                              const Caps& caps) {
  const int c = G.cols();
  std::vector<MVec> gens;
  for (int j = 0; j < c; ++j) gens.push_back(column_of(G, j));
  for (const auto& q : R.ix_gb)
    for (int i = 0; i < G.rows(); ++i) {
      std::vector<MTerm> ts;
      for (const auto& t : q.ts) ts.push_back({i, t});
      gens.push_back(mvec_normalize(std::move(ts), *G.src.ring));
    }
  ModGB gb = module_gb(G.dst, gens, true, caps);
  std::vector<Poly> rep;
  MVec nf = module_nf(v, gb, &rep);
  if (!nf.is_zero()) return std::nullopt;
  rep.resize(c, poly_zero(G.src.ring));
  if (R.is_quotient())
    for (auto& f : rep) f = ctx_nf(f, R);
  return rep;
}

// --------------------------------------------------------------------------
// graded pieces

std::vector<Monomial> ring_basis(const RingCtx& R, int d) {
  std::vector<Monomial> all = monomials_of_degree(*R.S, d);
  if (!R.is_quotient()) return all;
  std::vector<Monomial> out;
  for (auto& m : all) {
    bool standard = true;
    for (const auto& g : R.ix_gb)
      if (mono_divides(g.lt().m, m)) { standard = false; break; }
    if (standard) out.push_back(std::move(m));
  }
  return out;
}

long ring_hf(const RingCtx& R, int d) {
  if (d < 0) return 0;
  return (long)ring_basis(R, d).size();
}

size_t ModuleBasis::index_of(int comp, const Monomial& m) const {
  auto it = index.find({comp, m.e});
  if (it == index.end())
    throw std::logic_error("ModuleBasis::index_of: not a basis element");
  return it->second;
}

ModuleBasis module_basis(const FreeMod& F, const RingCtx& R, int d) {
  ModuleBasis b;
  b.degree = d;
  for (int i = 0; i < F.rank(); ++i)
    for (auto& m : ring_basis(R, d - F.tw[i]))
      b.elems.push_back({i, std::move(m)});
  for (size_t i = 0; i < b.elems.size(); ++i)
    b.index[{b.elems[i].first, b.elems[i].second.e}] = i;
  return b;
}

std::vector<int64_t> mvec_coords(const MVec& v, const FreeMod& F,
                                 const RingCtx& R, const ModuleBasis& basis) {
  std::vector<int64_t> c(basis.size(), 0);
  const int64_t p = F.ring->p;
  for (int i = 0; i < F.rank(); ++i) {
    std::vector<Term> ts;
    for (const auto& t : v.ts)
      if (t.comp == i) ts.push_back(t.t);
    if (ts.empty()) continue;
    Poly f = ctx_nf(poly_from_terms(F.ring, std::move(ts)), R);
    for (const auto& t : f.ts)
      c[basis.index_of(i, t.m)] = fp_add(c[basis.index_of(i, t.m)], t.c, p);
  }
  return c;
}

MVec mvec_from_coords(const std::vector<int64_t>& c, const ModuleBasis& basis,
                      const PolyRing& ring) {
  std::vector<MTerm> ts;
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i])
      ts.push_back({basis.elems[i].first,
                    {fp_norm(c[i], ring.p), basis.elems[i].second}});
  return mvec_normalize(std::move(ts), ring);
}

std::vector<int> minimal_column_set(const GradedMatrix& M, const RingCtx& R) {
  const int c = M.cols();
  std::vector<int> order(c);
  for (int j = 0; j < c; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (M.src.tw[a] != M.src.tw[b]) return M.src.tw[a] < M.src.tw[b];
    return a < b;
  });

  std::vector<int> kept;
  std::vector<MVec> kept_cols;
  size_t pos = 0;
  while (pos < order.size()) {
    int d = M.src.tw[order[pos]];
    size_t end = pos;
    while (end < order.size() && M.src.tw[order[end]] == d) ++end;

    ModuleBasis basis = module_basis(M.dst, R, d);
    EchelonSpan span((int)basis.size(), M.src.ring->p);
    for (size_t k = 0; k < kept_cols.size(); ++k) {
      int gd = M.src.tw[kept[k]];
      for (const auto& m : ring_basis(R, d - gd)) {
        MVec prod = mvec_term_mul({1, m}, kept_cols[k], *M.src.ring);
        span.add(mvec_coords(prod, M.dst, R, basis));
      }
    }
    for (size_t q = pos; q < end; ++q) {
      MVec col = column_of(M, order[q]);
      if (span.add(mvec_coords(col, M.dst, R, basis))) {
        kept.push_back(order[q]);
        kept_cols.push_back(std::move(col));
      }
    }
    pos = end;
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace gliaison
