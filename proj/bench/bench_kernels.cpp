// Benchmark of the dense GF(p) row-reduction kernel: serial reference vs the
// OpenMP variant, plus an end-to-end Groebner timing for scale.

#include <chrono>
#include <cstdio>

#include "gliaison/ideal.hpp"
#include "gliaison/linalg.hpp"

using namespace gliaison;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

static FpMat random_matrix(int n, int m, int64_t p, Rng& rng) {
  FpMat a(n, m, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) a.at(i, j) = rng.uniform(p);
  return a;
}

int main() {
  const int64_t p = 32003;
  Rng rng(42);
  std::printf("%-14s %10s %12s %12s %8s\n", "size", "rank", "serial(ms)",
              "openmp(ms)", "speedup");
  for (int n : {64, 128, 256, 512, 1024}) {
    FpMat a = random_matrix(n, n + 16, p, rng);
    FpMat b = a;
    auto t0 = Clock::now();
    int r1 = row_reduce(a, nullptr, Kernel::Serial);
    double serial = ms_since(t0);
    t0 = Clock::now();
    int r2 = row_reduce(b, nullptr, Kernel::Parallel);
    double par = ms_since(t0);
    if (r1 != r2 || a.a != b.a) {
      std::printf("MISMATCH at n=%d\n", n);
      return 1;
    }
    std::printf("%5dx%-8d %10d %12.2f %12.2f %7.2fx\n", n, n + 16, r1, serial,
                par, serial / par);
  }

  // end-to-end: Groebner basis of a determinantal ideal in 6 variables
  {
    auto S = PolyRing::make(p, {"a", "b", "c", "d", "e", "f"});
    auto v = [&](int i) { return poly_var(S, i); };
    std::vector<Poly> gens = {
        poly_sub(poly_mul(v(0), v(3)), poly_mul(v(1), v(2))),
        poly_sub(poly_mul(v(0), v(5)), poly_mul(v(1), v(4))),
        poly_sub(poly_mul(v(2), v(5)), poly_mul(v(3), v(4))),
        poly_sub(poly_mul(v(0), poly_mul(v(0), v(0))), poly_mul(v(5), poly_mul(v(5), v(5)))),
    };
    Ideal I(S, gens);
    auto t0 = Clock::now();
    size_t gb = I.gb().size();
    std::printf("\ngroebner basis: %zu elements in %.2f ms\n", gb, ms_since(t0));
  }
  return 0;
}
