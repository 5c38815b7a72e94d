#include "gliaison/resolve.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace gliaison {

GradedMatrix syzygies(const GradedMatrix& M, const RingCtx& R, const Caps& caps) {
  check_graded(M);
  GradedMatrix K = kernel(M, R, caps);
  std::vector<int> keep = minimal_column_set(K, R);
  std::vector<MVec> cols;
  std::vector<int> tw;
  for (int j : keep) {
    cols.push_back(column_of(K, j));
    tw.push_back(K.src.tw[j]);
  }
  return matrix_from_columns(M.src, cols, tw);
}

long image_rank_in_degree(const GradedMatrix& P, const RingCtx& R, int d) {
  ModuleBasis basis = module_basis(P.dst, R, d);
  EchelonSpan span((int)basis.size(), R.S->p);
  for (int j = 0; j < P.cols(); ++j) {
    int gd = P.src.tw[j];
    if (gd > d) continue;
    MVec col = column_of(P, j);
    for (const auto& m : ring_basis(R, d - gd))
      span.add(mvec_coords(mvec_term_mul({1, m}, col, *R.S), P.dst, R, basis));
  }
  return span.rank();
}

long module_hf(const GradedMatrix& P, const RingCtx& R, int d) {
  long total = (long)module_basis(P.dst, R, d).size();
  return total - image_rank_in_degree(P, R, d);
}

bool certify_kernel(const GradedMatrix& M, const GradedMatrix& K,
                    const RingCtx& R, int dmax) {
  if (!matrix_is_zero(compose(M, K))) return false;
  int lo = 0;
  for (int t : M.src.tw) lo = std::min(lo, t);
  for (int t : M.dst.tw) lo = std::min(lo, t);
  for (int d = lo; d <= dmax; ++d) {
    ModuleBasis src_b = module_basis(M.src, R, d);
    long dim_src = (long)src_b.size();
    long rank_M = image_rank_in_degree(M, R, d);
    // dim ker(M)_d over the quotient counts I_X·src as zero, which is what
    // module_basis already does
    long dim_ker = dim_src - rank_M;
    long rank_K = image_rank_in_degree(K, R, d);
    if (rank_K != dim_ker) return false;
  }
  return true;
}

GradedMatrix minimalize_presentation(GradedMatrix P) {
  const int64_t p = P.src.ring->p;
  for (;;) {
    int pi = -1, pj = -1;
    for (int i = 0; i < P.rows() && pi < 0; ++i)
      for (int j = 0; j < P.cols(); ++j)
        if (P.e[i][j].is_constant()) { pi = i; pj = j; break; }
    if (pi < 0) break;
    int64_t u = P.e[pi][pj].lt().c;
    // clear row pi across other columns
    for (int j = 0; j < P.cols(); ++j) {
      if (j == pj || P.e[pi][j].is_zero()) continue;
      Poly f = poly_scale(P.e[pi][j], fp_inv(u, p));
      for (int i = 0; i < P.rows(); ++i)
        P.e[i][j] = poly_sub(P.e[i][j], poly_mul(f, P.e[i][pj]));
    }
    // clear column pj across other rows
    for (int i = 0; i < P.rows(); ++i) {
      if (i == pi || P.e[i][pj].is_zero()) continue;
      Poly f = poly_scale(P.e[i][pj], fp_inv(u, p));
      for (int j = 0; j < P.cols(); ++j)
        P.e[i][j] = poly_sub(P.e[i][j], poly_mul(f, P.e[pi][j]));
    }
    // drop generator pi and relation pj
    GradedMatrix Q = zero_matrix(
        free_mod(P.src.ring, [&] {
          std::vector<int> tw;
          for (int j = 0; j < P.cols(); ++j)
            if (j != pj) tw.push_back(P.src.tw[j]);
          return tw;
        }()),
        free_mod(P.src.ring, [&] {
          std::vector<int> tw;
          for (int i = 0; i < P.rows(); ++i)
            if (i != pi) tw.push_back(P.dst.tw[i]);
          return tw;
        }()));
    for (int i = 0, i2 = 0; i < P.rows(); ++i) {
      if (i == pi) continue;
      for (int j = 0, j2 = 0; j < P.cols(); ++j) {
        if (j == pj) continue;
        Q.e[i2][j2] = P.e[i][j];
        ++j2;
      }
      ++i2;
    }
    P = std::move(Q);
  }
  return P;
}

namespace {

// matrices equal up to twist, row/column permutation, and unit rescaling
bool matrices_match_up_to_twist(const GradedMatrix& A, const GradedMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
  if (A.rows() == 0 || A.cols() == 0) return A.rows() == B.rows() && A.cols() == B.cols();
  // candidate twist from sorted generator degrees
  std::vector<int> at = A.dst.tw, bt = B.dst.tw;
  std::sort(at.begin(), at.end());
  std::sort(bt.begin(), bt.end());
  int delta = bt[0] - at[0];
  for (size_t i = 0; i < at.size(); ++i)
    if (bt[i] - at[i] != delta) return false;
  std::vector<int> as = A.src.tw, bs = B.src.tw;
  std::sort(as.begin(), as.end());
  std::sort(bs.begin(), bs.end());
  for (size_t i = 0; i < as.size(); ++i)
    if (bs[i] - as[i] != delta) return false;
  // search a row permutation + column permutation with proportional entries;
  // fixture matrices are small, a simple backtracking works
  int n = A.rows(), m = A.cols();
  std::vector<int> rperm(n, -1);
  std::vector<bool> rused(n, false);

  auto cols_match = [&](const std::vector<int>& rp) {
    std::vector<int> cperm(m, -1);
    std::vector<bool> cused(m, false);
    // match columns greedily with backtracking
    std::function<bool(int)> go = [&](int j) -> bool {
      if (j == m) return true;
      for (int j2 = 0; j2 < m; ++j2) {
        if (cused[j2]) continue;
        if (B.src.tw[j2] != A.src.tw[j] + delta) continue;
        // find a consistent scalar
        int64_t scale = 0;
        bool ok = true;
        const int64_t p = A.src.ring->p;
        for (int i = 0; i < n && ok; ++i) {
          const Poly& a = A.e[i][j];
          const Poly& b = B.e[rp[i]][j2];
          if (a.is_zero() != b.is_zero()) { ok = false; break; }
          if (a.is_zero()) continue;
          if (a.ts.size() != b.ts.size()) { ok = false; break; }
          for (size_t t = 0; t < a.ts.size() && ok; ++t) {
            if (!(a.ts[t].m == b.ts[t].m)) { ok = false; break; }
            int64_t r = fp_div(b.ts[t].c, a.ts[t].c, p);
            if (scale == 0) scale = r;
            else if (scale != r) ok = false;
          }
        }
        if (!ok) continue;
        cused[j2] = true;
        cperm[j] = j2;
        if (go(j + 1)) return true;
        cused[j2] = false;
      }
      return false;
    };
    return go(0);
  };

  std::function<bool(int)> pick_row = [&](int i) -> bool {
    if (i == n) return cols_match(rperm);
    for (int i2 = 0; i2 < n; ++i2) {
      if (rused[i2]) continue;
      if (B.dst.tw[i2] != A.dst.tw[i] + delta) continue;
      rused[i2] = true;
      rperm[i] = i2;
      if (pick_row(i + 1)) return true;
      rused[i2] = false;
    }
    return false;
  };
  return pick_row(0);
}

}  // namespace

FreeResolution free_resolution(const GradedMatrix& P0, int length,
                               const RingCtx& R, const Caps& caps) {
  FreeResolution res;
  res.R = R;
  GradedMatrix P = minimalize_presentation(P0);
  // reduce entries over the quotient
  if (R.is_quotient()) {
    for (auto& row : P.e)
      for (auto& f : row) f = ctx_nf(f, R);
    P = minimalize_presentation(P);
  }
  res.F0 = P.dst;
  {
    std::vector<int> keep = minimal_column_set(P, R);
    std::vector<MVec> cols;
    std::vector<int> tw;
    for (int j : keep) { cols.push_back(column_of(P, j)); tw.push_back(P.src.tw[j]); }
    P = matrix_from_columns(P.dst, cols, tw);
  }
  res.minimal = true;
  if (P.cols() == 0) { res.finite = true; return res; }
  res.steps.push_back(P);
  for (int k = 1; k < length || (length < 0 && !R.is_quotient()); ++k) {
    GradedMatrix K = syzygies(res.steps.back(), R, caps);
    if (K.cols() == 0) { res.finite = true; break; }
    res.steps.push_back(std::move(K));
    if ((int)res.steps.size() >= (int)R.S->nvars() + 2 && !R.is_quotient())
      throw std::logic_error("free_resolution: exceeded global dimension");
  }
  if (R.is_quotient()) {
    for (size_t i = 0; i + 2 < res.steps.size(); ++i)
      if (matrices_match_up_to_twist(res.steps[i], res.steps[i + 2])) {
        res.periodic_from = (int)i + 1;
        break;
      }
  }
  return res;
}

FreeResolution resolve_cyclic(const Ideal& I, int length) {
  RingPtr S = I.ring();
  Ideal T = trim(I);
  std::vector<int> tw;
  for (const auto& g : T.gens()) tw.push_back(g.degree());
  GradedMatrix P = zero_matrix(free_mod(S, tw), free_mod(S, {0}));
  for (size_t j = 0; j < T.gens().size(); ++j) P.e[0][j] = T.gens()[j];
  if (length < 0) length = (int)S->nvars() + 1;
  return free_resolution(P, length, ring_ctx(S));
}

void minimalize(FreeResolution& res) {
  // cancel unit entries across consecutive maps
  for (;;) {
    bool changed = false;
    for (size_t k = 0; k < res.steps.size(); ++k) {
      GradedMatrix& D = res.steps[k];
      int pi = -1, pj = -1;
      for (int i = 0; i < D.rows() && pi < 0; ++i)
        for (int j = 0; j < D.cols(); ++j)
          if (D.e[i][j].is_constant()) { pi = i; pj = j; break; }
      if (pi < 0) continue;
      const int64_t p = D.src.ring->p;
      int64_t u = D.e[pi][pj].lt().c;
      // column operations on D propagate as row operations on steps[k+1]
      for (int j = 0; j < D.cols(); ++j) {
        if (j == pj || D.e[pi][j].is_zero()) continue;
        Poly f = poly_scale(D.e[pi][j], fp_inv(u, p));
        for (int i = 0; i < D.rows(); ++i)
          D.e[i][j] = poly_sub(D.e[i][j], poly_mul(f, D.e[i][pj]));
        if (k + 1 < res.steps.size()) {
          GradedMatrix& N = res.steps[k + 1];
          for (int c = 0; c < N.cols(); ++c)
            N.e[pj][c] = poly_add(N.e[pj][c], poly_mul(f, N.e[j][c]));
        }
      }
      // row operations on D propagate as column operations on steps[k-1]
      for (int i = 0; i < D.rows(); ++i) {
        if (i == pi || D.e[i][pj].is_zero()) continue;
        Poly f = poly_scale(D.e[i][pj], fp_inv(u, p));
        for (int j = 0; j < D.cols(); ++j)
          D.e[i][j] = poly_sub(D.e[i][j], poly_mul(f, D.e[pi][j]));
        if (k > 0) {
          GradedMatrix& B = res.steps[k - 1];
          for (int r = 0; r < B.rows(); ++r)
            B.e[r][pi] = poly_add(B.e[r][pi], poly_mul(f, B.e[r][i]));
        }
      }
      // remove generator pi of F_k and generator pj of F_{k+1}
      auto drop_row = [](GradedMatrix& M, int r) {
        M.e.erase(M.e.begin() + r);
        M.dst.tw.erase(M.dst.tw.begin() + r);
      };
      auto drop_col = [](GradedMatrix& M, int c) {
        for (auto& row : M.e) row.erase(row.begin() + c);
        M.src.tw.erase(M.src.tw.begin() + c);
      };
      drop_row(D, pi);
      drop_col(D, pj);
      if (k > 0) drop_col(res.steps[k - 1], pi);
      if (k + 1 < res.steps.size()) drop_row(res.steps[k + 1], pj);
      if (k == 0) res.F0 = D.dst;
      changed = true;
    }
    if (!changed) break;
  }
  while (!res.steps.empty() && res.steps.back().cols() == 0)
    res.steps.pop_back();
  res.minimal = true;
}

BettiTable betti(const FreeResolution& res) {
  if (!res.minimal)
    throw std::invalid_argument("betti: resolution is not minimal (minimalize first)");
  BettiTable t;
  for (int w : res.F0.tw) t.b[{0, w}]++;
  for (int k = 0; k < res.length(); ++k)
    for (int w : res.steps[k].src.tw) t.b[{k + 1, w}]++;
  t.periodic_from = res.periodic_from;
  return t;
}

std::string betti_to_text(const BettiTable& t) {
  std::ostringstream os;
  int imax = 0, jmin = 0, jmax = 0;
  for (const auto& [k, v] : t.b) {
    imax = std::max(imax, k.first);
    jmin = std::min(jmin, k.second);
    jmax = std::max(jmax, k.second);
  }
  os << "    ";
  for (int i = 0; i <= imax; ++i) os << "\t" << i;
  os << "\n";
  for (int j = jmin; j <= jmax; ++j) {
    bool any = false;
    for (int i = 0; i <= imax; ++i) any |= t.b.count({i, j}) > 0;
    if (!any) continue;
    os << "j=" << j << ":";
    for (int i = 0; i <= imax; ++i) {
      auto it = t.b.find({i, j});
      os << "\t" << (it == t.b.end() ? 0 : it->second);
    }
    os << "\n";
  }
  if (t.periodic_from)
    os << "(2-periodic from step " << *t.periodic_from << ")\n";
  return os.str();
}

std::map<int, long> hilbert_function(const Ideal& I, int lo, int hi) {
  std::map<int, long> hf;
  for (int d = lo; d <= hi; ++d) hf[d] = hf_quotient(I, d);
  return hf;
}

Classification classify(const Ideal& I) {
  Classification c;
  if (I.is_zero_ideal()) { c.zero = true; return c; }
  if (ideal_is_unit(I)) { c.empty = true; return c; }
  DimInfo di = dimension_codim(I);
  c.codim = di.codim;
  FreeResolution res = resolve_cyclic(I);
  c.pd = res.length();
  c.min_gens = res.length() >= 1 ? res.steps[0].cols() : 0;
  c.is_CM = (c.pd == c.codim);
  int last_rank = res.length() >= 1 ? res.steps.back().src.rank() : 1;
  c.is_AG = c.is_CM && last_rank == 1;
  c.is_CI = c.is_CM && c.min_gens == c.codim;
  if (c.is_CI && !c.is_AG)
    throw std::logic_error("classify: inconsistent CI/AG flags");
  return c;
}

}  // namespace gliaison
