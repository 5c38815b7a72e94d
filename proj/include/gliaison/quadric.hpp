#ifndef GLIAISON_QUADRIC_HPP
#define GLIAISON_QUADRIC_HPP

#include "gliaison/liaison.hpp"

namespace gliaison {

// Linear matrix factorization A·B = B·A = q·Id of a quadratic form.
struct MatrixFactorization {
  RingPtr S;
  Poly q;
  GradedMatrix A, B;
  int size = 0;
};

// verify A·B = B·A = q·Id exactly; throws on failure
void check_mf(const MatrixFactorization& mf);

// size-4 factorization of a smooth quadric in 5 variables (char ≠ 2);
// the cokernel of A over S/(q) is the rank-2 spinor module
MatrixFactorization spinor_mf(const Poly& q);

// size-2 factorizations of a split rank-4 quadric in 4 variables; the two
// values of `which` give the two rulings
MatrixFactorization ruling_mf(const Poly& q, int which);

// twist an entire factorization (shifts the cokernel's generator degrees)
MatrixFactorization twist_mf(const MatrixFactorization& mf, int a);

// coker(A) over S/(q), generators in degree -a after twisting
FPModule mf_cokernel(const MatrixFactorization& mf, const RingCtx& R);

// --- MCM decomposition -------------------------------------------------------

struct McmSummand {
  std::string label;
  int twist = 0;
};

struct MCMDecomposition {
  std::vector<int> free_twists;
  std::vector<McmSummand> summands;
  bool certified = false;   // reassembled sum compares equal at shift 0
  std::string note;
};

// decompose an MCM module against a list of labelled indecomposables
// (their twists are scanned); failure to match is reported, not guessed
MCMDecomposition mcm_decompose(
    const FPModule& M,
    const std::vector<std::pair<std::string, FPModule>>& indecomposables,
    uint64_t seed = 1);

// the standard quadric threefold ambient: q in 5 variables
struct QuadricThreefold {
  AmbientPtr X;
  MatrixFactorization mf;
  FPModule spin;  // coker(A), generators in degree 0
};
QuadricThreefold quadric_threefold(RingPtr S, const Poly& q);

// ag_scheme_from_section specialization used by the drivers
SectionScheme ag_scheme_from_section(const QuadricThreefold& Q,
                                     const FPModule& E, int d, uint64_t seed);

}  // namespace gliaison

#endif
