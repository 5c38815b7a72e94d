#ifndef GLIAISON_RING_HPP
#define GLIAISON_RING_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gliaison/gf.hpp"

namespace gliaison {

// Monomial order. Graded reverse lexicographic is the working order
// everywhere; elimination-style computations (intersections, quotients,
// kernels) run through the module layer, where the component order does the
// eliminating.
enum class Order { GrevLex };

struct PolyRing;
using RingPtr = std::shared_ptr<const PolyRing>;

struct PolyRing {
  int64_t p;                       // prime characteristic
  std::vector<std::string> vars;   // all of degree 1
  Order ord = Order::GrevLex;

  size_t nvars() const { return vars.size(); }
  int var_index(const std::string& name) const;

  static RingPtr make(int64_t p, std::vector<std::string> vars,
                      Order ord = Order::GrevLex);
};

bool same_ring(const RingPtr& a, const RingPtr& b);

struct Monomial {
  std::vector<uint16_t> e;

  int deg() const {
    int d = 0;
    for (auto x : e) d += x;
    return d;
  }
  bool is_one() const {
    for (auto x : e) if (x) return false;
    return true;
  }
  bool operator==(const Monomial& o) const { return e == o.e; }
};

Monomial mono_one(size_t n);
Monomial mono_var(size_t n, size_t i, int k = 1);
Monomial mono_mul(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& a, const Monomial& b);   // a | b
Monomial mono_div(const Monomial& b, const Monomial& a);   // b / a
Monomial mono_lcm(const Monomial& a, const Monomial& b);
bool mono_coprime(const Monomial& a, const Monomial& b);

// strict less-than in the ring's order
bool mono_less(const Monomial& a, const Monomial& b, const PolyRing& R);

struct Term {
  int64_t c;
  Monomial m;
};

// Terms sorted strictly descending in the ring's order; no zero coefficients.
struct Poly {
  RingPtr ring;
  std::vector<Term> ts;

  bool is_zero() const { return ts.empty(); }
  const Term& lt() const { return ts.front(); }
  // degree of a homogeneous polynomial (-1 for zero)
  int degree() const { return ts.empty() ? -1 : ts.front().m.deg(); }
  bool is_homogeneous() const;
  bool is_constant() const { return !ts.empty() && ts.front().m.is_one(); }
};

Poly poly_zero(RingPtr R);
Poly poly_const(RingPtr R, int64_t c);
Poly poly_var(RingPtr R, size_t i);
Poly poly_from_terms(RingPtr R, std::vector<Term> ts);  // normalizes

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_scale(const Poly& a, int64_t c);
Poly term_mul(const Term& t, const Poly& a);
Poly poly_mul(const Poly& a, const Poly& b);
bool poly_eq(const Poly& a, const Poly& b);

// exact division: returns b/a if a divides b exactly, else nullopt
std::optional<Poly> poly_exact_div(const Poly& b, const Poly& a);

std::string poly_to_string(const Poly& f);
std::string mono_to_string(const Monomial& m, const PolyRing& R);

// All monomials of total degree d in n variables, in a fixed deterministic
// order (descending grevlex).
std::vector<Monomial> monomials_of_degree(const PolyRing& R, int d);

// Map a polynomial into another ring by variable name (used for the
// elimination auxiliary variable). Missing variables must not occur.
Poly map_to_ring(const Poly& f, RingPtr target);

// xoshiro-free deterministic RNG: splitmix64, stable across platforms.
struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed) {}
  uint64_t next() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  int64_t uniform(int64_t n) { return (int64_t)(next() % (uint64_t)n); }
};

}  // namespace gliaison

#endif
