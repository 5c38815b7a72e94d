#include "gliaison/linalg.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gliaison {

bool parallel_kernels_enabled() {
#ifdef _OPENMP
  static const bool disabled = std::getenv("GLIAISON_SERIAL_KERNELS") != nullptr;
  return !disabled;
#else
  return false;
#endif
}

namespace {

constexpr int kParallelThreshold = 64;  // rows*cols/1000 heuristic below

bool use_parallel(const FpMat& m, Kernel k) {
  if (k == Kernel::Serial) return false;
  if (!parallel_kernels_enabled()) return false;
  if (k == Kernel::Parallel) return true;
  return m.rows >= kParallelThreshold && m.cols >= kParallelThreshold;
}

// Eliminate column `pc` from all rows except `pr`, assuming m(pr,pc) == 1.
void eliminate_serial(FpMat& m, int pr, int pc) {
  const int64_t p = m.p;
  for (int i = 0; i < m.rows; ++i) {
    if (i == pr) continue;
    int64_t f = m.at(i, pc);
    if (f == 0) continue;
    for (int j = pc; j < m.cols; ++j)
      m.at(i, j) = fp_sub(m.at(i, j), fp_mul(f, m.at(pr, j), p), p);
  }
}

void eliminate_parallel(FpMat& m, int pr, int pc) {
  const int64_t p = m.p;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < m.rows; ++i) {
    if (i == pr) continue;
    int64_t f = m.at(i, pc);
    if (f == 0) continue;
    for (int j = pc; j < m.cols; ++j)
      m.at(i, j) = fp_sub(m.at(i, j), fp_mul(f, m.at(pr, j), p), p);
  }
}

}  // namespace

int row_reduce(FpMat& m, std::vector<int>* pivots, Kernel k) {
  const bool par = use_parallel(m, k);
  const int64_t p = m.p;
  if (pivots) pivots->clear();
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int pr = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) { pr = i; break; }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = c; j < m.cols; ++j) std::swap(m.at(pr, j), m.at(r, j));
    int64_t inv = fp_inv(m.at(r, c), p);
    if (inv != 1)
      for (int j = c; j < m.cols; ++j) m.at(r, j) = fp_mul(m.at(r, j), inv, p);
    if (par)
      eliminate_parallel(m, r, c);
    else
      eliminate_serial(m, r, c);
    if (pivots) pivots->push_back(c);
    ++r;
  }
  return r;
}

int rank_of(FpMat m, Kernel k) { return row_reduce(m, nullptr, k); }

FpMat nullspace(const FpMat& m0, Kernel k) {
  FpMat m = m0;
  std::vector<int> piv;
  int r = row_reduce(m, &piv, k);
  std::vector<char> is_piv(m.cols, 0);
  for (int c : piv) is_piv[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < m.cols; ++c)
    if (!is_piv[c]) free_cols.push_back(c);
  FpMat ns(m.cols, (int)free_cols.size(), m.p);
  for (int fi = 0; fi < (int)free_cols.size(); ++fi) {
    int fc = free_cols[fi];
    ns.at(fc, fi) = 1;
    for (int i = 0; i < r; ++i)
      ns.at(piv[i], fi) = fp_neg(m.at(i, fc), m.p);
  }
  return ns;
}

std::optional<std::vector<int64_t>> solve(const FpMat& m0,
                                          const std::vector<int64_t>& b,
                                          Kernel k) {
  FpMat m(m0.rows, m0.cols + 1, m0.p);
  for (int i = 0; i < m0.rows; ++i) {
    for (int j = 0; j < m0.cols; ++j) m.at(i, j) = m0.at(i, j);
    m.at(i, m0.cols) = fp_norm(b[i], m0.p);
  }
  std::vector<int> piv;
  int r = row_reduce(m, &piv, k);
  std::vector<int64_t> x(m0.cols, 0);
  for (int i = 0; i < r; ++i) {
    if (piv[i] == m0.cols) return std::nullopt;  // inconsistent
    x[piv[i]] = m.at(i, m0.cols);
  }
  return x;
}

bool EchelonSpan::reduce(std::vector<int64_t>& v) const {
  for (size_t r = 0; r < rows.size(); ++r) {
    int64_t f = v[piv[r]];
    if (f == 0) continue;
    for (int j = 0; j < width; ++j)
      v[j] = fp_sub(v[j], fp_mul(f, rows[r][j], p), p);
  }
  for (int j = 0; j < width; ++j)
    if (v[j] != 0) return false;
  return true;
}

bool EchelonSpan::add(std::vector<int64_t> v) {
  if (reduce(v)) return false;
  int pc = 0;
  while (v[pc] == 0) ++pc;
  int64_t inv = fp_inv(v[pc], p);
  for (int j = 0; j < width; ++j) v[j] = fp_mul(v[j], inv, p);
  // back-substitute into existing rows to stay fully reduced
  for (size_t r = 0; r < rows.size(); ++r) {
    int64_t f = rows[r][pc];
    if (f == 0) continue;
    for (int j = 0; j < width; ++j)
      rows[r][j] = fp_sub(rows[r][j], fp_mul(f, v[j], p), p);
  }
  rows.push_back(std::move(v));
  piv.push_back(pc);
  return true;
}

FpMat mat_mul(const FpMat& a, const FpMat& b) {
  FpMat c(a.rows, b.cols, a.p);
  for (int i = 0; i < a.rows; ++i)
    for (int l = 0; l < a.cols; ++l) {
      int64_t v = a.at(i, l);
      if (v == 0) continue;
      for (int j = 0; j < b.cols; ++j)
        c.at(i, j) = fp_add(c.at(i, j), fp_mul(v, b.at(l, j), c.p), c.p);
    }
  return c;
}

}  // namespace gliaison
