#ifndef GLIAISON_IDEAL_HPP
#define GLIAISON_IDEAL_HPP

#include <memory>
#include <mutex>
#include <vector>

#include "gliaison/modules.hpp"

namespace gliaison {

// Homogeneous ideal with a write-once cached reduced Gröbner basis.
// Values are immutable after construction; copies share the cache.
class Ideal {
 public:
  Ideal() = default;
  Ideal(RingPtr R, std::vector<Poly> gens);

  const RingPtr& ring() const { return ring_; }
  const std::vector<Poly>& gens() const { return gens_; }
  bool is_zero_ideal() const;

  // unique reduced Gröbner basis, computed once
  const std::vector<Poly>& gb(const Caps& caps = default_caps()) const;

 private:
  RingPtr ring_;
  std::vector<Poly> gens_;
  struct Cache {
    std::once_flag once;
    std::vector<Poly> gb;
  };
  std::shared_ptr<Cache> cache_;
};

// context for S/I computations, reusing the ideal's cached basis
RingCtx quotient_ctx(const Ideal& I);

Poly normal_form(const Poly& f, const Ideal& I);
bool ideal_contains(const Ideal& I, const Poly& f);
bool ideal_eq(const Ideal& I, const Ideal& J);   // via reduced bases
bool ideal_is_unit(const Ideal& I);

Ideal ideal_sum(const Ideal& I, const Ideal& J);
Ideal ideal_product(const Ideal& I, const Ideal& J);
Ideal ideal_intersection(const Ideal& I, const Ideal& J);
Ideal ideal_quotient(const Ideal& I, const Ideal& J);    // I : J
Ideal saturate(const Ideal& I, const Ideal& J);          // I : J^∞
Ideal saturate_irrelevant(const Ideal& I);               // J = (x_0..x_n)

struct DimInfo {
  bool empty = false;   // unit ideal
  int krull = 0;        // Krull dimension of S/I
  int proj_dim = 0;     // projective dimension of V(I), krull - 1
  int codim = 0;
};
DimInfo dimension_codim(const Ideal& I);

// basis of the degree-d piece of I
std::vector<Poly> graded_piece(const Ideal& I, int d);
// uniformly random element of (I)_d, deterministic under seed
Poly random_homogeneous(const Ideal& I, int d, uint64_t seed);

long hf_quotient(const Ideal& I, int d);   // dim_k (S/I)_d
long hf_ideal(const Ideal& I, int d);      // dim_k (I)_d

// degree of V(I) from the Hilbert polynomial's normalized leading coefficient
long scheme_degree(const Ideal& I);

// the ideal of minimal generators (redundant generators dropped)
Ideal trim(const Ideal& I);

}  // namespace gliaison

#endif
