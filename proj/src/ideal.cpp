#include "gliaison/ideal.hpp"

#include <algorithm>

#include "gliaison/linalg.hpp"

namespace gliaison {

Ideal::Ideal(RingPtr R, std::vector<Poly> gens)
    : ring_(std::move(R)), cache_(std::make_shared<Cache>()) {
  for (auto& g : gens) {
    if (!same_ring(g.ring, ring_))
      throw std::invalid_argument("ideal generator from a different ring");
    if (!g.is_homogeneous())
      throw std::invalid_argument("ideal generator not homogeneous: " +
                                  poly_to_string(g));
    if (!g.is_zero()) gens_.push_back(std::move(g));
  }
}

bool Ideal::is_zero_ideal() const { return gens_.empty(); }

const std::vector<Poly>& Ideal::gb(const Caps& caps) const {
  std::call_once(cache_->once, [&]() {
    FreeMod F = free_mod(ring_, {0});
    std::vector<MVec> in;
    for (const auto& g : gens_) {
      MVec v;
      for (const auto& t : g.ts) v.ts.push_back({0, t});
      in.push_back(std::move(v));
    }
    ModGB gb = module_gb(F, in, false, caps);
    for (const auto& g : gb.g) {
      std::vector<Term> ts;
      for (const auto& t : g.ts) ts.push_back(t.t);
      cache_->gb.push_back(poly_from_terms(ring_, std::move(ts)));
    }
  });
  return cache_->gb;
}

RingCtx quotient_ctx(const Ideal& I) {
  RingCtx R;
  R.S = I.ring();
  if (!I.is_zero_ideal()) {
    R.ix_gens = I.gens();
    R.ix_gb = I.gb();
  }
  return R;
}

Poly normal_form(const Poly& f, const Ideal& I) {
  if (!same_ring(f.ring, I.ring()))
    throw std::invalid_argument("normal_form: ring mismatch");
  return poly_nf(f, I.gb());
}

bool ideal_contains(const Ideal& I, const Poly& f) {
  return normal_form(f, I).is_zero();
}

bool ideal_eq(const Ideal& I, const Ideal& J) {
  const auto& a = I.gb();
  const auto& b = J.gb();
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!poly_eq(a[i], b[i])) return false;
  return true;
}

bool ideal_is_unit(const Ideal& I) {
  const auto& g = I.gb();
  return g.size() == 1 && g[0].is_constant();
}

Ideal ideal_sum(const Ideal& I, const Ideal& J) {
  if (!same_ring(I.ring(), J.ring()))
    throw std::invalid_argument("ideal_sum: ring mismatch");
  std::vector<Poly> g = I.gens();
  for (const auto& f : J.gens()) g.push_back(f);
  return Ideal(I.ring(), std::move(g));
}

Ideal ideal_product(const Ideal& I, const Ideal& J) {
  if (!same_ring(I.ring(), J.ring()))
    throw std::invalid_argument("ideal_product: ring mismatch");
  std::vector<Poly> g;
  for (const auto& a : I.gens())
    for (const auto& b : J.gens()) g.push_back(poly_mul(a, b));
  return Ideal(I.ring(), std::move(g));
}

// Intersection through syzygies: a syzygy (a,b) of [gens I | gens J] has
// Σ a_i f_i = -Σ b_j g_j in I ∩ J, and every element of the intersection
// arises this way.
Ideal ideal_intersection(const Ideal& I, const Ideal& J) {
  if (!same_ring(I.ring(), J.ring()))
    throw std::invalid_argument("ideal_intersection: ring mismatch");
  if (I.is_zero_ideal() || J.is_zero_ideal()) return Ideal(I.ring(), {});
  RingPtr S = I.ring();
  std::vector<int> tw;
  std::vector<Poly> all;
  for (const auto& f : I.gens()) { tw.push_back(f.degree()); all.push_back(f); }
  size_t nI = all.size();
  for (const auto& f : J.gens()) { tw.push_back(f.degree()); all.push_back(f); }
  GradedMatrix M = zero_matrix(free_mod(S, tw), free_mod(S, {0}));
  for (size_t j = 0; j < all.size(); ++j) M.e[0][j] = all[j];
  GradedMatrix K = kernel(M, ring_ctx(S));
  std::vector<Poly> out;
  for (int j = 0; j < K.cols(); ++j) {
    Poly h = poly_zero(S);
    for (size_t i = 0; i < nI; ++i)
      h = poly_add(h, poly_mul(K.e[i][j], I.gens()[i]));
    if (!h.is_zero()) out.push_back(h);
  }
  return Ideal(S, std::move(out));
}

// I : J = kernel of S -> ⊕_j (S/I)(deg g_j),  f ↦ (f·g_j)
Ideal ideal_quotient(const Ideal& I, const Ideal& J) {
  if (!same_ring(I.ring(), J.ring()))
    throw std::invalid_argument("ideal_quotient: ring mismatch");
  if (J.is_zero_ideal())
    throw std::invalid_argument("ideal_quotient: zero divisor ideal");
  RingPtr S = I.ring();
  if (I.is_zero_ideal()) {
    // (0) : J = 0 in a domain
    return Ideal(S, {});
  }
  std::vector<int> tw;
  for (const auto& g : J.gens()) tw.push_back(-g.degree());
  GradedMatrix M = zero_matrix(free_mod(S, {0}), free_mod(S, tw));
  for (size_t i = 0; i < J.gens().size(); ++i) M.e[i][0] = J.gens()[i];
  GradedMatrix K = kernel(M, quotient_ctx(I));
  std::vector<Poly> out = I.gens();
  for (int j = 0; j < K.cols(); ++j)
    if (!K.e[0][j].is_zero()) out.push_back(K.e[0][j]);
  return trim(Ideal(S, std::move(out)));
}

Ideal saturate(const Ideal& I, const Ideal& J) {
  Ideal cur = I;
  for (int it = 0; it < 256; ++it) {
    Ideal next = ideal_quotient(cur, J);
    if (ideal_eq(next, cur)) return cur;  // stability certificate
    cur = next;
  }
  throw LimitError("saturate: no stabilization within iteration bound");
}

Ideal saturate_irrelevant(const Ideal& I) {
  std::vector<Poly> vars;
  for (size_t i = 0; i < I.ring()->nvars(); ++i)
    vars.push_back(poly_var(I.ring(), i));
  return saturate(I, Ideal(I.ring(), vars));
}

DimInfo dimension_codim(const Ideal& I) {
  const int n = (int)I.ring()->nvars();
  DimInfo d;
  if (I.is_zero_ideal()) {
    d.krull = n;
    d.proj_dim = n - 1;
    d.codim = 0;
    return d;
  }
  const auto& gb = I.gb();
  if (ideal_is_unit(I)) {
    d.empty = true;
    d.krull = 0;
    d.proj_dim = -1;
    d.codim = n;
    return d;
  }
  // maximal independent set of variables against the initial ideal
  int best = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    int sz = __builtin_popcount(mask);
    if (sz <= best) continue;
    bool independent = true;
    for (const auto& g : gb) {
      bool supported = true;
      for (int i = 0; i < n && supported; ++i)
        if (g.lt().m.e[i] && !(mask & (1u << i))) supported = false;
      if (supported) { independent = false; break; }
    }
    if (independent) best = sz;
  }
  d.krull = best;
  d.proj_dim = best - 1;
  d.codim = n - best;
  return d;
}

std::vector<Poly> graded_piece(const Ideal& I, int d) {
  RingPtr S = I.ring();
  std::vector<Monomial> basis = monomials_of_degree(*S, d);
  std::map<std::vector<uint16_t>, size_t> index;
  for (size_t i = 0; i < basis.size(); ++i) index[basis[i].e] = i;
  EchelonSpan span((int)basis.size(), S->p);
  std::vector<Poly> out;
  // Use the reduced basis: multiples of its elements span (I)_d.
  for (const auto& g : I.gb()) {
    int gd = g.degree();
    if (gd > d) continue;
    for (const auto& m : monomials_of_degree(*S, d - gd)) {
      Poly f = term_mul({1, m}, g);
      std::vector<int64_t> v(basis.size(), 0);
      for (const auto& t : f.ts) v[index[t.m.e]] = t.c;
      if (span.add(std::move(v))) out.push_back(std::move(f));
    }
  }
  return out;
}

Poly random_homogeneous(const Ideal& I, int d, uint64_t seed) {
  std::vector<Poly> basis = graded_piece(I, d);
  if (basis.empty())
    throw std::invalid_argument("random_homogeneous: empty graded piece");
  Rng rng(seed);
  Poly f = poly_zero(I.ring());
  for (const auto& b : basis)
    f = poly_add(f, poly_scale(b, rng.uniform(I.ring()->p)));
  if (f.is_zero()) return random_homogeneous(I, d, seed + 0x9e37);
  return f;
}

long hf_quotient(const Ideal& I, int d) {
  if (d < 0) return 0;
  return ring_hf(quotient_ctx(I), d);
}

long hf_ideal(const Ideal& I, int d) {
  if (d < 0) return 0;
  long total = 1;
  {  // dim S_d
    RingCtx S = ring_ctx(I.ring());
    total = ring_hf(S, d);
  }
  return total - hf_quotient(I, d);
}

long scheme_degree(const Ideal& I) {
  DimInfo di = dimension_codim(I);
  if (di.empty) return 0;
  int k = di.krull;  // HF grows like deg/(k-1)! * d^(k-1)
  std::vector<long> hf;
  int hi = 8;
  for (const auto& g : I.gens()) hi += g.degree();
  hi = std::min(hi, 60);
  for (int d = 0; d <= hi; ++d) hf.push_back(hf_quotient(I, d));
  for (int it = 0; it < k - 1; ++it)
    for (size_t d = hf.size() - 1; d >= 1; --d) hf[d] -= hf[d - 1];
  // stabilized (k-1)-st difference is the degree
  for (size_t d = hf.size() - 1; d >= 2; --d)
    if (hf[d] == hf[d - 1] && hf[d - 1] == hf[d - 2]) return hf[d];
  throw LimitError("scheme_degree: Hilbert polynomial window too small");
}

Ideal trim(const Ideal& I) {
  if (I.is_zero_ideal()) return I;
  RingPtr S = I.ring();
  std::vector<int> tw;
  for (const auto& g : I.gens()) tw.push_back(g.degree());
  GradedMatrix M = zero_matrix(free_mod(S, tw), free_mod(S, {0}));
  for (size_t j = 0; j < I.gens().size(); ++j) M.e[0][j] = I.gens()[j];
  std::vector<int> keep = minimal_column_set(M, ring_ctx(S));
  std::vector<Poly> out;
  for (int j : keep) out.push_back(I.gens()[j]);
  return Ideal(S, std::move(out));
}

}  // namespace gliaison
