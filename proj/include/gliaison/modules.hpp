#ifndef GLIAISON_MODULES_HPP
#define GLIAISON_MODULES_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gliaison/linalg.hpp"

#include "gliaison/ring.hpp"

namespace gliaison {

// Thrown when a computation exceeds the configured resource caps. Always an
// explicit error, never a truncated answer.
struct LimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Caps {
  int max_pair_degree = 40;
  long max_pairs = 1000000;
};

Caps& default_caps();

// Graded free module F = ⊕_i R(-tw[i]); tw[i] is the degree of generator i.
struct FreeMod {
  RingPtr ring;
  std::vector<int> tw;
  int rank() const { return (int)tw.size(); }
};

FreeMod free_mod(RingPtr R, std::vector<int> tw);
FreeMod dual_free(const FreeMod& F);                  // twists negated
FreeMod concat(const FreeMod& A, const FreeMod& B);

// Element of a free module: terms (component, ring term), kept sorted
// strictly descending in the position-over-term order (lower component
// index dominates, ties broken by the ring's monomial order).
struct MTerm {
  int comp;
  Term t;
};

struct MVec {
  std::vector<MTerm> ts;
  bool is_zero() const { return ts.empty(); }
  const MTerm& lt() const { return ts.front(); }
};

bool mterm_less(const MTerm& a, const MTerm& b, const PolyRing& R);
MVec mvec_normalize(std::vector<MTerm> ts, const PolyRing& R);
MVec mvec_add(const MVec& a, const MVec& b, const PolyRing& R);
MVec mvec_sub(const MVec& a, const MVec& b, const PolyRing& R);
MVec mvec_scale(const MVec& a, int64_t c, const PolyRing& R);
MVec mvec_term_mul(const Term& t, const MVec& a, const PolyRing& R);
MVec mvec_unit(size_t n_unused, int comp, RingPtr R);

// degree of a homogeneous element of F (throws if inhomogeneous)
int mvec_degree(const MVec& v, const FreeMod& F);
bool mvec_is_homogeneous(const MVec& v, const FreeMod& F);

// Homogeneous matrix: columns are images of source generators in the target.
struct GradedMatrix {
  FreeMod src, dst;
  std::vector<std::vector<Poly>> e;  // e[row][col]

  int rows() const { return (int)dst.tw.size(); }
  int cols() const { return (int)src.tw.size(); }
};

GradedMatrix zero_matrix(const FreeMod& src, const FreeMod& dst);
GradedMatrix identity_matrix(const FreeMod& F);
void check_graded(const GradedMatrix& M);  // throws on degree violations
GradedMatrix transpose(const GradedMatrix& M);
GradedMatrix compose(const GradedMatrix& A, const GradedMatrix& B);  // A∘B
GradedMatrix twist_matrix(const GradedMatrix& M, int a);  // M as map of F(a)'s
bool matrix_is_zero(const GradedMatrix& M);

MVec column_of(const GradedMatrix& M, int j);
GradedMatrix matrix_from_columns(const FreeMod& dst,
                                 const std::vector<MVec>& cols,
                                 const std::vector<int>& col_tw);

// --- Gröbner bases of submodules of a free module ---------------------------

struct ModGB {
  FreeMod F;
  std::vector<MVec> g;                    // reduced basis, unit lead coeffs
  std::vector<std::vector<Poly>> rep;     // g[i] = Σ_j rep[i][j]·input[j]
  bool has_rep = false;
};

ModGB module_gb(const FreeMod& F, const std::vector<MVec>& gens,
                bool track_rep = false, const Caps& caps = default_caps());

// Normal form of v against gb; if rep_out is non-null (requires has_rep),
// fills coefficients c with  v = nf + Σ_j c[j]·input[j].
MVec module_nf(const MVec& v, const ModGB& gb, std::vector<Poly>* rep_out = nullptr);

// --- Quotient-ring context ---------------------------------------------------
//
// Computations over R = S/I_X are done over S after adjoining I_X-multiples
// of the target generators; entries are read modulo the reduced basis of I_X.

struct RingCtx {
  RingPtr S;
  std::vector<Poly> ix_gens;  // empty for the polynomial ring itself
  std::vector<Poly> ix_gb;    // reduced GB of I_X (empty iff ix_gens empty)

  bool is_quotient() const { return !ix_gens.empty(); }
};

RingCtx ring_ctx(RingPtr S);                       // plain polynomial ring
RingCtx ring_ctx(RingPtr S, std::vector<Poly> ix); // S / (ix)

Poly ctx_nf(const Poly& f, const RingCtx& R);      // normal form mod I_X

// kernel of M: src -> dst over the context ring; columns of the result
// generate ker(M) (mod I_X in the quotient case). Entries are reduced.
GradedMatrix kernel(const GradedMatrix& M, const RingCtx& R,
                    const Caps& caps = default_caps());

// Express v as a combination of the columns of G modulo I_X·dst:
// returns c with  G·c ≡ v, or nullopt if v is not in the column module.
std::optional<std::vector<Poly>> lift_through(const GradedMatrix& G,
                                              const MVec& v, const RingCtx& R,
                                              const Caps& caps = default_caps());

// Minimal generators of the column module of M (graded Nakayama, degreewise
// linear algebra over the context ring). Returns the selected column indices.
std::vector<int> minimal_column_set(const GradedMatrix& M, const RingCtx& R);

// normal form of f against a list of polynomials (full reduction)
Poly poly_nf(const Poly& f, const std::vector<Poly>& gb);

// k-basis of the degree-d piece of the context ring: standard monomials.
std::vector<Monomial> ring_basis(const RingCtx& R, int d);
long ring_hf(const RingCtx& R, int d);  // its dimension

// k-basis of the degree-d piece of the free module F over the context ring,
// with an index for coordinate extraction.
struct ModuleBasis {
  int degree = 0;
  std::vector<std::pair<int, Monomial>> elems;  // (component, monomial)
  std::map<std::pair<int, std::vector<uint16_t>>, size_t> index;
  size_t index_of(int comp, const Monomial& m) const;
  size_t size() const { return elems.size(); }
};

ModuleBasis module_basis(const FreeMod& F, const RingCtx& R, int d);
std::vector<int64_t> mvec_coords(const MVec& v, const FreeMod& F,
                                 const RingCtx& R, const ModuleBasis& basis);
MVec mvec_from_coords(const std::vector<int64_t>& c, const ModuleBasis& basis,
                      const PolyRing& ring);

}  // namespace gliaison

#endif
