#include "gliaison/ring.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gliaison {

int PolyRing::var_index(const std::string& name) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return (int)i;
  return -1;
}

RingPtr PolyRing::make(int64_t p, std::vector<std::string> vars, Order ord) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic must be prime");
  if (p >= (int64_t(1) << 31))
    throw std::invalid_argument("characteristic too large (need p < 2^31)");
  for (size_t i = 0; i < vars.size(); ++i)
    for (size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j])
        throw std::invalid_argument("duplicate variable name: " + vars[i]);
  auto r = std::make_shared<PolyRing>();
  r->p = p;
  r->vars = std::move(vars);
  r->ord = ord;
  return r;
}

bool same_ring(const RingPtr& a, const RingPtr& b) {
  if (a == b) return true;
  return a && b && a->p == b->p && a->vars == b->vars && a->ord == b->ord;
}

Monomial mono_one(size_t n) { return Monomial{std::vector<uint16_t>(n, 0)}; }

Monomial mono_var(size_t n, size_t i, int k) {
  Monomial m = mono_one(n);
  m.e[i] = (uint16_t)k;
  return m;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (size_t i = 0; i < r.e.size(); ++i) r.e[i] += b.e[i];
  return r;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.e.size(); ++i)
    if (a.e[i] > b.e[i]) return false;
  return true;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
  Monomial r = b;
  for (size_t i = 0; i < r.e.size(); ++i) r.e[i] -= a.e[i];
  return r;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (size_t i = 0; i < r.e.size(); ++i) r.e[i] = std::max(r.e[i], b.e[i]);
  return r;
}

bool mono_coprime(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.e.size(); ++i)
    if (a.e[i] && b.e[i]) return false;
  return true;
}

namespace {

// grevlex over variable range [lo, n): higher degree wins; on ties the
// monomial with the smaller exponent in the last differing variable wins.
int grevlex_cmp(const Monomial& a, const Monomial& b, size_t lo) {
  int da = 0, db = 0;
  for (size_t i = lo; i < a.e.size(); ++i) { da += a.e[i]; db += b.e[i]; }
  if (da != db) return da < db ? -1 : 1;
  for (size_t i = a.e.size(); i-- > lo;) {
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace

bool mono_less(const Monomial& a, const Monomial& b, const PolyRing& R) {
  (void)R;
  return grevlex_cmp(a, b, 0) < 0;
}

bool Poly::is_homogeneous() const {
  if (ts.empty()) return true;
  int d = ts.front().m.deg();
  for (const auto& t : ts)
    if (t.m.deg() != d) return false;
  return true;
}

Poly poly_zero(RingPtr R) { return Poly{std::move(R), {}}; }

Poly poly_const(RingPtr R, int64_t c) {
  c = fp_norm(c, R->p);
  Poly f{R, {}};
  if (c) f.ts.push_back({c, mono_one(R->nvars())});
  return f;
}

Poly poly_var(RingPtr R, size_t i) {
  Poly f{R, {}};
  f.ts.push_back({1, mono_var(R->nvars(), i)});
  return f;
}

Poly poly_from_terms(RingPtr R, std::vector<Term> ts) {
  const PolyRing& ring = *R;
  std::sort(ts.begin(), ts.end(), [&](const Term& a, const Term& b) {
    return mono_less(b.m, a.m, ring);  // descending
  });
  std::vector<Term> out;
  for (auto& t : ts) {
    int64_t c = fp_norm(t.c, ring.p);
    if (!out.empty() && out.back().m == t.m) {
      out.back().c = fp_add(out.back().c, c, ring.p);
      if (out.back().c == 0) out.pop_back();
    } else if (c != 0) {
      out.push_back({c, t.m});
    }
  }
  return Poly{std::move(R), std::move(out)};
}

Poly poly_add(const Poly& a, const Poly& b) {
  const PolyRing& R = *a.ring;
  std::vector<Term> out;
  out.reserve(a.ts.size() + b.ts.size());
  size_t i = 0, j = 0;
  while (i < a.ts.size() && j < b.ts.size()) {
    if (a.ts[i].m == b.ts[j].m) {
      int64_t c = fp_add(a.ts[i].c, b.ts[j].c, R.p);
      if (c) out.push_back({c, a.ts[i].m});
      ++i; ++j;
    } else if (mono_less(b.ts[j].m, a.ts[i].m, R)) {
      out.push_back(a.ts[i++]);
    } else {
      out.push_back(b.ts[j++]);
    }
  }
  while (i < a.ts.size()) out.push_back(a.ts[i++]);
  while (j < b.ts.size()) out.push_back(b.ts[j++]);
  return Poly{a.ring, std::move(out)};
}

Poly poly_neg(const Poly& a) {
  Poly r = a;
  for (auto& t : r.ts) t.c = fp_neg(t.c, a.ring->p);
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

Poly poly_scale(const Poly& a, int64_t c) {
  c = fp_norm(c, a.ring->p);
  if (c == 0) return poly_zero(a.ring);
  Poly r = a;
  for (auto& t : r.ts) t.c = fp_mul(t.c, c, a.ring->p);
  return r;
}

Poly term_mul(const Term& t, const Poly& a) {
  Poly r{a.ring, {}};
  r.ts.reserve(a.ts.size());
  for (const auto& s : a.ts)
    r.ts.push_back({fp_mul(s.c, t.c, a.ring->p), mono_mul(s.m, t.m)});
  return r;  // multiplying by a monomial preserves the term order
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly acc = poly_zero(a.ring);
  for (const auto& t : a.ts) acc = poly_add(acc, term_mul(t, b));
  return acc;
}

bool poly_eq(const Poly& a, const Poly& b) {
  if (a.ts.size() != b.ts.size()) return false;
  for (size_t i = 0; i < a.ts.size(); ++i)
    if (a.ts[i].c != b.ts[i].c || !(a.ts[i].m == b.ts[i].m)) return false;
  return true;
}

std::optional<Poly> poly_exact_div(const Poly& b, const Poly& a) {
  if (a.is_zero()) return std::nullopt;
  Poly rem = b;
  Poly q = poly_zero(b.ring);
  const int64_t p = b.ring->p;
  while (!rem.is_zero()) {
    if (!mono_divides(a.lt().m, rem.lt().m)) return std::nullopt;
    Term t{fp_div(rem.lt().c, a.lt().c, p), mono_div(rem.lt().m, a.lt().m)};
    q.ts.push_back(t);
    rem = poly_sub(rem, term_mul(t, a));
  }
  return poly_from_terms(b.ring, q.ts);
}

std::string mono_to_string(const Monomial& m, const PolyRing& R) {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < m.e.size(); ++i) {
    if (!m.e[i]) continue;
    if (!first) os << "*";
    os << R.vars[i];
    if (m.e[i] > 1) os << "^" << (int)m.e[i];
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

std::string poly_to_string(const Poly& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  const PolyRing& R = *f.ring;
  for (size_t i = 0; i < f.ts.size(); ++i) {
    const Term& t = f.ts[i];
    if (i) os << "+";
    if (t.m.is_one()) {
      os << t.c;
    } else if (t.c != 1) {
      os << t.c << "*" << mono_to_string(t.m, R);
    } else {
      os << mono_to_string(t.m, R);
    }
  }
  return os.str();
}

namespace {

void enumerate_rec(std::vector<uint16_t>& e, size_t i, int rem,
                   std::vector<Monomial>& out) {
  if (i + 1 == e.size()) {
    e[i] = (uint16_t)rem;
    out.push_back(Monomial{e});
    e[i] = 0;
    return;
  }
  for (int k = rem; k >= 0; --k) {
    e[i] = (uint16_t)k;
    enumerate_rec(e, i + 1, rem - k, out);
  }
  e[i] = 0;
}

}  // namespace

std::vector<Monomial> monomials_of_degree(const PolyRing& R, int d) {
  std::vector<Monomial> out;
  if (d < 0) return out;
  std::vector<uint16_t> e(R.nvars(), 0);
  if (R.nvars() == 0) {
    if (d == 0) out.push_back(Monomial{e});
    return out;
  }
  enumerate_rec(e, 0, d, out);
  const PolyRing& ring = R;
  std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) {
    return mono_less(b, a, ring);
  });
  return out;
}

Poly map_to_ring(const Poly& f, RingPtr target) {
  std::vector<int> idx(f.ring->nvars(), -1);
  for (size_t i = 0; i < f.ring->nvars(); ++i)
    idx[i] = target->var_index(f.ring->vars[i]);
  std::vector<Term> ts;
  for (const auto& t : f.ts) {
    Monomial m = mono_one(target->nvars());
    for (size_t i = 0; i < t.m.e.size(); ++i) {
      if (!t.m.e[i]) continue;
      if (idx[i] < 0)
        throw std::invalid_argument("map_to_ring: variable " +
                                    f.ring->vars[i] + " not in target ring");
      m.e[idx[i]] = t.m.e[i];
    }
    ts.push_back({t.c, m});
  }
  return poly_from_terms(std::move(target), std::move(ts));
}

}  // namespace gliaison
