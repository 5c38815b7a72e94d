#ifndef GLIAISON_DESCENT_HPP
#define GLIAISON_DESCENT_HPP

#include "gliaison/quadric.hpp"

namespace gliaison {

// recognize a smooth quadric threefold ambient and build its spinor data
std::optional<QuadricThreefold> try_quadric3(const AmbientPtr& X);

struct DescentOptions {
  uint64_t seed = 0;
  int max_steps = 12;
};

struct DescentResult {
  bool reached_ci = false;
  LiaisonTrace trace;
  Ideal final_ideal;
  std::string obstruction;  // empty when reached_ci
};

// Constructive glicci driver: peel spinor summands off the N-type module by
// G-liaison, then descend the dissocié phase by minimal CI-links. Honest
// 'stalled' outcome when the class obstruction (nonzero Rao module) or the
// search bound blocks progress.
DescentResult glicci_descent(const Subscheme& C, const DescentOptions& opt);

struct EvenClassReport {
  enum class Verdict { Same, Different, Undecided };
  Verdict verdict = Verdict::Undecided;
  std::optional<int> shift;
  std::vector<std::pair<int, int>> rao1, rao2;  // (degree, dimension)
  std::string note;
};

// even G-liaison comparison on the quadric threefold via Rao modules
EvenClassReport decide_even_class(const Subscheme& C1, const Subscheme& C2);

struct GlicciReport {
  bool is_acm = false;
  bool certificate = false;  // N-type module decomposed into spinors + frees
  MCMDecomposition dec;
  std::string note;
};

// glicci certificate for a single ACM subscheme of the quadric threefold
GlicciReport decide_glicci(const Subscheme& C, uint64_t seed = 1);

}  // namespace gliaison

#endif
