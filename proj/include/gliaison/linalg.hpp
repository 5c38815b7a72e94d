#ifndef GLIAISON_LINALG_HPP
#define GLIAISON_LINALG_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gliaison/gf.hpp"

namespace gliaison {

// Dense matrices over GF(p). This is the data-parallel kernel under all the
// degreewise computations (graded pieces, Hilbert functions, hom solving,
// finite-length module extraction). Row reduction has a serial reference
// implementation and an OpenMP one; both produce bit-identical echelon forms
// because row updates within one pivot step are independent.

struct FpMat {
  int rows = 0, cols = 0;
  int64_t p = 2;
  std::vector<int64_t> a;  // row-major

  FpMat() = default;
  FpMat(int r, int c, int64_t p_) : rows(r), cols(c), p(p_), a((size_t)r * c, 0) {}

  int64_t& at(int i, int j) { return a[(size_t)i * cols + j]; }
  int64_t at(int i, int j) const { return a[(size_t)i * cols + j]; }
};

enum class Kernel { Serial, Parallel, Auto };

// Reduce `m` in place to reduced row echelon form. Returns the rank and, if
// `pivots` is non-null, the pivot column of each nonzero row in order.
int row_reduce(FpMat& m, std::vector<int>* pivots = nullptr,
               Kernel k = Kernel::Auto);

int rank_of(FpMat m, Kernel k = Kernel::Auto);

// Basis of { x : m x = 0 }, one column per basis vector.
FpMat nullspace(const FpMat& m, Kernel k = Kernel::Auto);

// One solution of m x = b, if any.
std::optional<std::vector<int64_t>> solve(const FpMat& m,
                                          const std::vector<int64_t>& b,
                                          Kernel k = Kernel::Auto);

FpMat mat_mul(const FpMat& a, const FpMat& b);

// Effective kernel choice: Auto resolves to Parallel for matrices past a size
// threshold unless GLIAISON_SERIAL_KERNELS is set in the environment.
bool parallel_kernels_enabled();

// Incremental row space in echelon form: add vectors one at a time, query
// membership and rank. Used for degreewise span computations.
struct EchelonSpan {
  int64_t p;
  int width;
  std::vector<std::vector<int64_t>> rows;  // reduced, unit pivots
  std::vector<int> piv;

  EchelonSpan(int width_, int64_t p_) : p(p_), width(width_) {}
  int rank() const { return (int)rows.size(); }
  // reduces v against the span in place; returns true if v was in the span
  bool reduce(std::vector<int64_t>& v) const;
  // returns true if the vector enlarged the span
  bool add(std::vector<int64_t> v);
};

}  // namespace gliaison

#endif
