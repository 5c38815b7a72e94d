#ifndef GLIAISON_GF_HPP
#define GLIAISON_GF_HPP

#include <cstdint>
#include <stdexcept>

namespace gliaison {

// Arithmetic in GF(p) for a word-sized prime p < 2^31, so products fit in
// int64 without overflow. Elements are canonical representatives in [0, p).

inline int64_t fp_norm(int64_t a, int64_t p) {
  a %= p;
  return a < 0 ? a + p : a;
}

inline int64_t fp_add(int64_t a, int64_t b, int64_t p) {
  int64_t s = a + b;
  return s >= p ? s - p : s;
}

inline int64_t fp_sub(int64_t a, int64_t b, int64_t p) {
  int64_t s = a - b;
  return s < 0 ? s + p : s;
}

inline int64_t fp_neg(int64_t a, int64_t p) { return a == 0 ? 0 : p - a; }

inline int64_t fp_mul(int64_t a, int64_t b, int64_t p) { return (a * b) % p; }

inline int64_t fp_inv(int64_t a, int64_t p) {
  if (a == 0) throw std::domain_error("fp_inv: zero has no inverse");
  // extended Euclid
  int64_t r0 = p, r1 = a, s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    int64_t r2 = r0 - q * r1;
    int64_t s2 = s0 - q * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  return fp_norm(s0, p);
}

inline int64_t fp_div(int64_t a, int64_t b, int64_t p) {
  return fp_mul(a, fp_inv(b, p), p);
}

inline int64_t fp_pow(int64_t a, int64_t e, int64_t p) {
  int64_t r = 1 % p;
  a = fp_norm(a, p);
  while (e > 0) {
    if (e & 1) r = fp_mul(r, a, p);
    a = fp_mul(a, a, p);
    e >>= 1;
  }
  return r;
}

// Deterministic trial division; characteristics are small (< 2^31).
inline bool is_prime(int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (int64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

}  // namespace gliaison

#endif
