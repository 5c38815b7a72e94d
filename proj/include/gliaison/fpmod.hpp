#ifndef GLIAISON_FPMOD_HPP
#define GLIAISON_FPMOD_HPP

#include <optional>

#include "gliaison/resolve.hpp"

namespace gliaison {

// Finitely presented graded module over the context ring: M = coker(pres),
// with I_X·F0 implicit in the quotient case. When the module was born as a
// submodule of a free module (kernels, duals, ideals), `embed` records the
// generator values there; several constructions evaluate through it.
struct FPModule {
  RingCtx R;
  GradedMatrix pres;                  // F1 -> F0
  std::optional<GradedMatrix> embed;  // F0-gens -> ambient free module

  const FreeMod& cover() const { return pres.dst; }
};

FPModule fp_free(const RingCtx& R, std::vector<int> twists);
FPModule fp_from_presentation(const RingCtx& R, GradedMatrix P);
// the cyclic module R/I' where I' is given by generators inside the ctx ring
FPModule fp_cyclic(const RingCtx& R, const std::vector<Poly>& gens);
// the R-module (I + I_X)/I_X with its embedding into R
FPModule ideal_module(const Ideal& I, const RingCtx& R);

bool fp_is_zero(const FPModule& M);
FPModule fp_minimize(const FPModule& M);      // minimal presentation (drops embed)
FPModule fp_twist(const FPModule& M, int a);  // M(a)
FPModule fp_direct_sum(const FPModule& A, const FPModule& B);
long fp_hf(const FPModule& M, int d);
int fp_rank(const FPModule& M);               // generic rank over the ctx ring
int ctx_krull(const RingCtx& R);

// minimal free cover: twists are the minimal generator degrees
FreeMod minimal_cover(const FPModule& M);

// syzygy module σM = ker(minimal cover -> M), embedded in the cover
FPModule syzygy_module(const FPModule& M);

// M^∨ = Hom(M, R), presented as ker of the transposed presentation; the
// embedding stores each dual generator's values on the generators of M.
FPModule dual(const FPModule& M);

// value of the dual generator χ_j (column j of dual.embed) on a cover vector
Poly dual_eval(const FPModule& dualM, int j, const std::vector<Poly>& cover_vec);

// Hom_R(M, N) as a module
FPModule hom_module(const FPModule& M, const FPModule& N);

// Ext^i_S(M, S)(t) for M over the polynomial ring
FPModule ext_module(int i, const FPModule& M, int t);

// subquotient (im U + im V)/im V of the free module U.dst, generated by the
// columns of U
FPModule subquotient(const GradedMatrix& U, const GradedMatrix& V,
                     const RingCtx& R);

// basis of Hom(M, N)_0 as cover-level matrices that descend
std::vector<GradedMatrix> solve_homs(const FPModule& M, const FPModule& N);

// a hom M -> N with prescribed compatibility eps_N ∘ Φ = eps_M, where the
// eps are given by their values on generators (maps to R up to twist)
std::optional<GradedMatrix> solve_hom_compat(const FPModule& M,
                                             const FPModule& N,
                                             const std::vector<Poly>& epsM,
                                             const std::vector<Poly>& epsN);

// a hom Φ: M -> N with Φ∘cols ≡ target modulo the relations of N, where
// cols: W -> M.cover and target: W -> N.cover share source labels
std::optional<GradedMatrix> solve_hom_with_images(const FPModule& M,
                                                  const FPModule& N,
                                                  const GradedMatrix& cols,
                                                  const GradedMatrix& target);

// split summand search: ι: T -> M and π: M -> T with π∘ι = id_T
struct SplitMaps {
  GradedMatrix iota, pi;
};
std::optional<SplitMaps> find_split(const FPModule& M, const FPModule& T,
                                    uint64_t seed);

bool is_MCM(const FPModule& M);
int pd_over_S(const FPModule& M);

struct StripResult {
  FPModule m0;                 // no free direct summands
  std::vector<int> free_twists;  // the stripped ⊕ R(-a)
};
StripResult strip_free(const FPModule& M);

enum class CompareVerdict { Equal, Differ, Undecided };
struct StableCompareResult {
  CompareVerdict verdict;
  int shift = 0;  // N ≅ M(shift) after stripping free summands
};
// stable equivalence test: strip, align Betti data over all shifts, then
// certify by an explicit isomorphism found with seeded random combinations
StableCompareResult stable_compare(const FPModule& M, const FPModule& N,
                                   uint64_t seed = 1);

// explicit isomorphism search M ≅ N (no twisting); certificate is a pair of
// degree-0 homs whose generator matrices are invertible both ways
bool fp_isomorphic(const FPModule& M, const FPModule& N, uint64_t seed = 1);

// --- finite length modules ---------------------------------------------------

struct FiniteLengthModule {
  int64_t p = 2;
  int nvars = 0;
  int dmin = 0;
  std::vector<int> dims;                    // dims[k] = dim in degree dmin+k
  std::vector<std::vector<FpMat>> mult;     // mult[v][k]: deg k piece -> k+1

  int total_dim() const {
    int s = 0;
    for (int d : dims) s += d;
    return s;
  }
  bool is_zero() const { return total_dim() == 0; }
};

// degreewise extraction; fails with a window error if the module does not
// terminate within the scan bound
FiniteLengthModule to_finite_length(const FPModule& M);

FiniteLengthModule graded_dual(const FiniteLengthModule& F);
bool flm_equal(const FiniteLengthModule& A, const FiniteLengthModule& B);
// A ≅ B(shift)? tries every dimension-compatible shift, then solves for a
// degreewise isomorphism commuting with the multiplications
std::optional<int> flm_iso_up_to_twist(const FiniteLengthModule& A,
                                       const FiniteLengthModule& B,
                                       uint64_t seed = 1);

}  // namespace gliaison

#endif
