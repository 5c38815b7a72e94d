#ifndef GLIAISON_RESOLVE_HPP
#define GLIAISON_RESOLVE_HPP

#include <map>
#include <optional>

#include "gliaison/ideal.hpp"

namespace gliaison {

// syzygies(M): homogeneous matrix whose columns generate ker(M) over the
// context ring, reduced to a minimal generating set.
GradedMatrix syzygies(const GradedMatrix& M, const RingCtx& R,
                      const Caps& caps = default_caps());

// degreewise check that the columns of K generate exactly ker(M) within the
// window [0, dmax]: composite zero plus rank accounting in each degree.
bool certify_kernel(const GradedMatrix& M, const GradedMatrix& K,
                    const RingCtx& R, int dmax);

// dim_k of the degree-d piece of coker(P) over the context ring
long module_hf(const GradedMatrix& P, const RingCtx& R, int d);
long image_rank_in_degree(const GradedMatrix& P, const RingCtx& R, int d);

struct FreeResolution {
  RingCtx R;
  FreeMod F0;
  std::vector<GradedMatrix> steps;   // steps[0]: F_1 -> F_0, etc.
  bool minimal = false;
  bool finite = false;               // the last kernel was zero
  std::optional<int> periodic_from;  // onset of detected 2-periodicity

  int length() const { return (int)steps.size(); }
};

// minimal free resolution of coker(P), at most `length` steps. Over the
// polynomial ring stops when the kernel vanishes; over a quotient ring
// computes exactly `length` steps and flags detected 2-periodicity.
FreeResolution free_resolution(const GradedMatrix& P, int length,
                               const RingCtx& R,
                               const Caps& caps = default_caps());

// resolution of S/I over S (far enough to read pd)
FreeResolution resolve_cyclic(const Ideal& I, int length = -1);

// Cancel unit entries of a (not necessarily minimal) complex in place until
// none remain. Quasi-isomorphism is preserved; idempotent.
void minimalize(FreeResolution& res);
GradedMatrix minimalize_presentation(GradedMatrix P);

struct BettiTable {
  // (homological index, internal degree) -> rank
  std::map<std::pair<int, int>, int> b;
  std::optional<int> periodic_from;
};

BettiTable betti(const FreeResolution& res);  // res must be minimal
std::string betti_to_text(const BettiTable& t);

std::map<int, long> hilbert_function(const Ideal& I, int lo, int hi);

struct Classification {
  bool empty = false;   // unit ideal
  bool zero = false;    // zero ideal
  bool is_CM = false;
  bool is_AG = false;
  bool is_CI = false;
  int codim = 0;
  int pd = 0;
  int min_gens = 0;
};

// classification of V(I) in P^n via the graded Auslander-Buchsbaum test:
// CM iff pd(S/I) = codim, AG iff CM with last Betti number 1, CI iff the
// minimal generator count equals the codimension.
Classification classify(const Ideal& I);

}  // namespace gliaison

#endif
