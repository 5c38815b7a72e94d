#include "gliaison/quadric.hpp"

#include <algorithm>

namespace gliaison {

namespace {

// Gram matrix of a quadratic form (char ≠ 2): q(x) = x^T G x
FpMat gram(const Poly& q) {
  const RingPtr& S = q.ring;
  int n = (int)S->nvars();
  FpMat G(n, n, S->p);
  int64_t inv2 = fp_inv(2, S->p);
  for (const auto& t : q.ts) {
    int i = -1, j = -1;
    for (int v = 0; v < n; ++v) {
      if (t.m.e[v] == 2) { i = j = v; break; }
      if (t.m.e[v] == 1) { (i < 0 ? i : j) = v; }
    }
    if (i < 0 || j < 0) throw std::invalid_argument("not a quadratic form");
    if (i == j) {
      G.at(i, i) = fp_add(G.at(i, i), t.c, S->p);
    } else {
      int64_t h = fp_mul(t.c, inv2, S->p);
      G.at(i, j) = fp_add(G.at(i, j), h, S->p);
      G.at(j, i) = fp_add(G.at(j, i), h, S->p);
    }
  }
  return G;
}

int64_t eval_q(const FpMat& G, const std::vector<int64_t>& v) {
  const int64_t p = G.p;
  int64_t acc = 0;
  for (int i = 0; i < G.rows; ++i) {
    if (v[i] == 0) continue;
    for (int j = 0; j < G.cols; ++j)
      acc = fp_add(acc, fp_mul(fp_mul(v[i], G.at(i, j), p), v[j], p), p);
  }
  return acc;
}

// polar form B(u,v) = u^T G v (so q(u+v) = q(u) + q(v) + 2B(u,v))
int64_t polar(const FpMat& G, const std::vector<int64_t>& u,
              const std::vector<int64_t>& v) {
  const int64_t p = G.p;
  int64_t acc = 0;
  for (int i = 0; i < G.rows; ++i) {
    if (u[i] == 0) continue;
    for (int j = 0; j < G.cols; ++j)
      acc = fp_add(acc, fp_mul(fp_mul(u[i], G.at(i, j), p), v[j], p), p);
  }
  return acc;
}

std::optional<int64_t> sqrt_mod(int64_t a, int64_t p) {
  a = fp_norm(a, p);
  if (a == 0) return 0;
  if (fp_pow(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return fp_pow(a, (p + 1) / 4, p);
  // Tonelli-Shanks
  int64_t s = 0, qq = p - 1;
  while (qq % 2 == 0) { qq /= 2; ++s; }
  int64_t z = 2;
  while (fp_pow(z, (p - 1) / 2, p) == 1) ++z;
  int64_t m = s, c = fp_pow(z, qq, p);
  int64_t t = fp_pow(a, qq, p), r = fp_pow(a, (qq + 1) / 2, p);
  while (t != 1) {
    int64_t i = 0, tt = t;
    while (tt != 1) { tt = fp_mul(tt, tt, p); ++i; }
    int64_t b = fp_pow(c, int64_t(1) << (m - i - 1), p);
    m = i;
    c = fp_mul(b, b, p);
    t = fp_mul(t, c, p);
    r = fp_mul(r, b, p);
  }
  return r;
}

// a nonzero isotropic vector of the restriction of q to the span of `basis`;
// requires rank >= 3 on that span (always solvable over a finite field)
std::optional<std::vector<int64_t>> isotropic_in_span(
    const FpMat& G, const std::vector<std::vector<int64_t>>& basis, Rng& rng) {
  const int64_t p = G.p;
  int n = (int)basis.size();
  auto combine = [&](const std::vector<int64_t>& c) {
    std::vector<int64_t> v(G.rows, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < G.rows; ++j)
        v[j] = fp_add(v[j], fp_mul(c[i], basis[i][j], p), p);
    return v;
  };
  for (int i = 0; i < n; ++i)
    if (eval_q(G, basis[i]) == 0) return basis[i];
  for (int trial = 0; trial < 400; ++trial) {
    // u + t·w isotropic: q(u) + t·2B(u,w) + t^2 q(w) = 0, solve for t
    std::vector<int64_t> cu(n), cw(n);
    for (auto& x : cu) x = rng.uniform(p);
    for (auto& x : cw) x = rng.uniform(p);
    auto u = combine(cu), w = combine(cw);
    int64_t qu = eval_q(G, u), qw = eval_q(G, w);
    int64_t bw = fp_mul(2, polar(G, u, w), p);
    if (qw == 0) {
      bool nz = false;
      for (auto x : w) nz |= x != 0;
      if (nz) return w;
      continue;
    }
    // t = (-bw ± sqrt(bw^2 - 4 qu qw)) / (2 qw)
    int64_t disc = fp_sub(fp_mul(bw, bw, p), fp_mul(4, fp_mul(qu, qw, p), p), p);
    auto root = sqrt_mod(disc, p);
    if (!root) continue;
    int64_t t = fp_div(fp_sub(*root, bw, p), fp_mul(2, qw, p), p);
    std::vector<int64_t> v(G.rows, 0);
    for (int j = 0; j < G.rows; ++j)
      v[j] = fp_add(u[j], fp_mul(t, w[j], p), p);
    bool nz = false;
    for (auto x : v) nz |= x != 0;
    if (nz && eval_q(G, v) == 0) return v;
  }
  return std::nullopt;
}

// change of coordinates bringing q to y0y1 + y2y3 + ... (+ c·y_last^2 for odd
// rank); returns column vectors of the new basis and the scalar c (or 1)
struct NormalForm {
  std::vector<std::vector<int64_t>> cols;  // x = Σ y_i · cols[i]
  int64_t c = 1;
  int pairs = 0;
};

NormalForm hyperbolic_normal_form(const FpMat& G, int rank_needed, Rng& rng) {
  const int64_t p = G.p;
  int n = G.rows;
  std::vector<std::vector<int64_t>> space;
  for (int i = 0; i < n; ++i) {
    std::vector<int64_t> e(n, 0);
    e[i] = 1;
    space.push_back(std::move(e));
  }
  NormalForm out;
  std::vector<std::vector<int64_t>> pairs_cols;
  while ((int)space.size() >= 2 && out.pairs * 2 + 2 <= rank_needed) {
    auto v = isotropic_in_span(G, space, rng);
    if (!v) break;
    // w with B(v,w) ≠ 0 inside the span
    std::vector<int64_t> w;
    for (const auto& cand : space)
      if (polar(G, *v, cand) != 0) { w = cand; break; }
    if (w.empty()) break;  // v is in the radical of the span
    int64_t bvw = polar(G, *v, w);
    // normalize: B(v,w') with w' = w/B(v,w), then make w' isotropic
    std::vector<int64_t> w1(n);
    int64_t inv = fp_inv(bvw, p);
    for (int i = 0; i < n; ++i) w1[i] = fp_mul(w[i], inv, p);
    int64_t qw = eval_q(G, w1);
    // q(w1 - qw·v) = qw - qw·B(v,w1)·2 ... with B(v,w1)=1: subtract qw·v
    std::vector<int64_t> w2(n);
    for (int i = 0; i < n; ++i)
      w2[i] = fp_sub(w1[i], fp_mul(qw, (*v)[i], p), p);
    // now q(v)=q(w2)=0, B(v,w2)=1, and q(s·v + t·w2) = 2st·B = ... scale so
    // that the plane contributes y0y1: q(s v + t w2) = 2 s t; absorb the 2
    std::vector<int64_t> v2(n);
    int64_t half = fp_inv(2, p);
    for (int i = 0; i < n; ++i) v2[i] = fp_mul((*v)[i], half, p);
    // q(s v2 + t w2) = s t
    pairs_cols.push_back(v2);
    pairs_cols.push_back(w2);
    ++out.pairs;
    // orthogonal complement of {v,w2} inside the span
    std::vector<std::vector<int64_t>> next;
    for (const auto& u : space) {
      // u' = u - B(u,w2)/B(v2,w2)·v2·... use coordinates against the pair
      int64_t a1 = polar(G, u, w2);  // coefficient along v2 (B(v2,w2)=1/2·..)
      int64_t a2 = polar(G, u, v2);
      int64_t bb = polar(G, v2, w2);
      int64_t ia = fp_inv(bb, p);
      std::vector<int64_t> u2(n);
      for (int i = 0; i < n; ++i) {
        int64_t x = u[i];
        x = fp_sub(x, fp_mul(fp_mul(a1, ia, p), v2[i], p), p);
        x = fp_sub(x, fp_mul(fp_mul(a2, ia, p), w2[i], p), p);
        u2[i] = x;
      }
      bool nz = false;
      for (auto y : u2) nz |= y != 0;
      if (nz) next.push_back(std::move(u2));
    }
    // reduce to an independent set
    {
      FpMat m((int)next.size(), n, p);
      for (size_t i = 0; i < next.size(); ++i)
        for (int j = 0; j < n; ++j) m.at((int)i, j) = next[i][j];
      std::vector<int> piv;
      int r = row_reduce(m, &piv);
      std::vector<std::vector<int64_t>> indep;
      for (int i = 0; i < r; ++i) {
        std::vector<int64_t> row(n);
        for (int j = 0; j < n; ++j) row[j] = m.at(i, j);
        indep.push_back(std::move(row));
      }
      space = std::move(indep);
    }
  }
  out.cols = pairs_cols;
  // remaining 1-dimensional piece (odd rank): pick a non-isotropic vector
  if (!space.empty()) {
    for (const auto& u : space) {
      int64_t c = eval_q(G, u);
      if (c != 0) {
        out.cols.push_back(u);
        out.c = c;
        break;
      }
    }
  }
  return out;
}

Poly linear_form(const RingPtr& S, const std::vector<int64_t>& coeffs) {
  std::vector<Term> ts;
  for (size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i])
      ts.push_back({coeffs[i], mono_var(S->nvars(), i)});
  return poly_from_terms(S, std::move(ts));
}

// substitute y_i -> linear forms into a matrix of linear forms in y
GradedMatrix substitute_linear(const GradedMatrix& M,
                               const std::vector<Poly>& images, RingPtr S) {
  GradedMatrix out = zero_matrix(free_mod(S, M.src.tw), free_mod(S, M.dst.tw));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      Poly acc = poly_zero(S);
      for (const auto& t : M.e[i][j].ts) {
        int v = -1;
        for (size_t x = 0; x < t.m.e.size(); ++x)
          if (t.m.e[x] == 1) { v = (int)x; break; }
        acc = poly_add(acc, poly_scale(images[v], t.c));
      }
      out.e[i][j] = acc;
    }
  return out;
}

// Knörrer-style doubling: from (A,B) of f to a factorization of f + u·v
std::pair<GradedMatrix, GradedMatrix> knorrer(const GradedMatrix& A,
                                              const GradedMatrix& B,
                                              const Poly& u, const Poly& v) {
  RingPtr S = u.ring;
  int n = A.rows();
  std::vector<int> dst = A.dst.tw, src = A.src.tw;
  std::vector<int> dst2 = dst, src2 = src;
  dst2.insert(dst2.end(), dst.begin(), dst.end());
  src2.insert(src2.end(), src.begin(), src.end());
  GradedMatrix A2 = zero_matrix(free_mod(S, src2), free_mod(S, dst2));
  GradedMatrix B2 = A2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A2.e[i][j] = A.e[i][j];
      A2.e[n + i][n + j] = poly_neg(B.e[i][j]);
      B2.e[i][j] = B.e[i][j];
      B2.e[n + i][n + j] = poly_neg(A.e[i][j]);
    }
  for (int i = 0; i < n; ++i) {
    A2.e[i][n + i] = u;
    A2.e[n + i][i] = v;
    B2.e[i][n + i] = u;
    B2.e[n + i][i] = v;
  }
  return {A2, B2};
}

}  // namespace

void check_mf(const MatrixFactorization& mf) {
  GradedMatrix AB = compose(mf.A, twist_matrix(mf.B, -1));
  GradedMatrix BA = compose(mf.B, twist_matrix(mf.A, -1));
  auto is_qI = [&](const GradedMatrix& M) {
    for (int i = 0; i < M.rows(); ++i)
      for (int j = 0; j < M.cols(); ++j) {
        if (i == j ? !poly_eq(M.e[i][j], mf.q) : !M.e[i][j].is_zero())
          return false;
      }
    return true;
  };
  if (!is_qI(AB) || !is_qI(BA))
    throw std::logic_error("matrix factorization identity A·B = B·A = q·Id failed");
}

static MatrixFactorization build_mf(const Poly& q, int nvars_required,
                                    int pairs_required) {
  const RingPtr& S = q.ring;
  if ((int)S->nvars() != nvars_required)
    throw std::invalid_argument("quadric must live in " +
                                std::to_string(nvars_required) + " variables");
  if (S->p == 2)
    throw std::invalid_argument("characteristic 2 is not supported here");
  if (!q.is_homogeneous() || q.degree() != 2)
    throw std::invalid_argument("not a quadratic form");
  FpMat G = gram(q);
  if (rank_of(G) != nvars_required)
    throw std::invalid_argument("quadric is singular");
  Rng rng(0x5eed);
  NormalForm nf = hyperbolic_normal_form(G, nvars_required, rng);
  if (nf.pairs < pairs_required)
    throw std::invalid_argument("quadric is not split enough over this field "
                                "(no rational ruling)");
  // build factorization of the normal form h(y), y-ring is S reused
  // odd rank: h = y0y1 + y2y3 + ... + c·y_last^2
  GradedMatrix A = zero_matrix(free_mod(S, {1}), free_mod(S, {0}));
  GradedMatrix B = A;
  size_t yi = 2 * nf.pairs;
  bool odd = (int)nf.cols.size() > 2 * nf.pairs;
  if (odd) {
    A.e[0][0] = poly_scale(poly_var(S, yi), nf.c);
    B.e[0][0] = poly_var(S, yi);
  } else {
    // even rank: start from the last hyperbolic pair
    A.e[0][0] = poly_var(S, 2 * nf.pairs - 2);
    B.e[0][0] = poly_var(S, 2 * nf.pairs - 1);
  }
  int start = odd ? nf.pairs - 1 : nf.pairs - 2;
  for (int k = start; k >= 0; --k) {
    auto [A2, B2] = knorrer(A, B, poly_var(S, 2 * k), poly_var(S, 2 * k + 1));
    A = std::move(A2);
    B = std::move(B2);
  }
  // substitute back: y_i corresponds to the coordinate of x along nf.cols[i];
  // we need the linear forms y_i(x): rows of the inverse of [cols]
  int n = nvars_required;
  FpMat Minv(n, 2 * n, S->p);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) Minv.at(i, j) = nf.cols[j][i];
  for (int i = 0; i < n; ++i) Minv.at(i, n + i) = 1;
  row_reduce(Minv);
  std::vector<Poly> images(n, poly_zero(S));
  for (int yrow = 0; yrow < n; ++yrow) {
    std::vector<int64_t> coeffs(n);
    for (int j = 0; j < n; ++j) coeffs[j] = Minv.at(yrow, n + j);
    images[yrow] = linear_form(S, coeffs);
  }
  MatrixFactorization mf;
  mf.S = S;
  mf.q = q;
  mf.A = substitute_linear(A, images, S);
  mf.B = substitute_linear(B, images, S);
  mf.size = mf.A.rows();
  check_mf(mf);
  return mf;
}

MatrixFactorization spinor_mf(const Poly& q) { return build_mf(q, 5, 2); }

MatrixFactorization ruling_mf(const Poly& q, int which) {
  MatrixFactorization mf = build_mf(q, 4, 2);
  if (which % 2 == 1) std::swap(mf.A, mf.B);
  return mf;
}

MatrixFactorization twist_mf(const MatrixFactorization& mf, int a) {
  MatrixFactorization t = mf;
  t.A = twist_matrix(mf.A, a);
  t.B = twist_matrix(mf.B, a);
  return t;
}

FPModule mf_cokernel(const MatrixFactorization& mf, const RingCtx& R) {
  return fp_from_presentation(R, mf.A);
}

MCMDecomposition mcm_decompose(
    const FPModule& M,
    const std::vector<std::pair<std::string, FPModule>>& indecomposables,
    uint64_t seed) {
  MCMDecomposition out;
  if (!is_MCM(M)) {
    out.note = "input is not maximal Cohen-Macaulay";
    return out;
  }
  StripResult sr = strip_free(M);
  out.free_twists = sr.free_twists;
  FPModule cur = sr.m0;
  int guard = 0;
  while (cur.cover().rank() > 0) {
    if (++guard > 64) {
      out.note = "decomposition did not terminate";
      return out;
    }
    bool found = false;
    int lo = cur.cover().tw[0], hi = cur.cover().tw[0];
    for (int t : cur.cover().tw) { lo = std::min(lo, t); hi = std::max(hi, t); }
    for (const auto& [label, T0] : indecomposables) {
      int tlo = T0.cover().tw[0], thi = T0.cover().tw[0];
      for (int t : T0.cover().tw) { tlo = std::min(tlo, t); thi = std::max(thi, t); }
      for (int a = tlo - hi; a <= thi - lo && !found; ++a) {
        FPModule T = fp_twist(T0, a);
        auto split = find_split(cur, T, seed + 31 * a + 7);
        if (!split) continue;
        out.summands.push_back({label, a});
        // complement: cur / im(iota)
        FreeMod src = concat(cur.pres.src, split->iota.src);
        GradedMatrix P2 = zero_matrix(src, cur.cover());
        for (int i = 0; i < cur.cover().rank(); ++i) {
          for (int j = 0; j < cur.pres.cols(); ++j) P2.e[i][j] = cur.pres.e[i][j];
          for (int j = 0; j < split->iota.cols(); ++j)
            P2.e[i][cur.pres.cols() + j] = split->iota.e[i][j];
        }
        cur = fp_minimize(FPModule{cur.R, std::move(P2), std::nullopt});
        StripResult sr2 = strip_free(cur);
        for (int t : sr2.free_twists) out.free_twists.push_back(t);
        cur = sr2.m0;
        found = true;
      }
      if (found) break;
    }
    if (!found) {
      out.note = "decomposition not found (internal consistency alarm)";
      return out;
    }
  }
  // certification by reassembly
  FPModule sum = fp_free(M.R, out.free_twists);
  for (const auto& s : out.summands)
    for (const auto& [label, T0] : indecomposables)
      if (label == s.label) sum = fp_direct_sum(sum, fp_twist(T0, s.twist));
  StableCompareResult cmp = stable_compare(sum, M, seed);
  out.certified = cmp.verdict == CompareVerdict::Equal && cmp.shift == 0;
  std::sort(out.free_twists.begin(), out.free_twists.end());
  std::sort(out.summands.begin(), out.summands.end(),
            [](const McmSummand& a, const McmSummand& b) {
              return a.label != b.label ? a.label < b.label : a.twist < b.twist;
            });
  out.note = out.certified ? "reassembly isomorphism verified"
                           : "reassembly comparison failed";
  return out;
}

QuadricThreefold quadric_threefold(RingPtr S, const Poly& q) {
  QuadricThreefold Q;
  Q.X = make_ambient(S, Ideal(S, {q}));
  Q.mf = spinor_mf(q);
  Q.spin = mf_cokernel(Q.mf, Q.X->R);
  return Q;
}

SectionScheme ag_scheme_from_section(const QuadricThreefold& Q,
                                     const FPModule& E, int d, uint64_t seed) {
  return ag_scheme_from_section_generic(Q.X, E, d, seed);
}

}  // namespace gliaison
