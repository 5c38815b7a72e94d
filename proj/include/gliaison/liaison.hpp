#ifndef GLIAISON_LIAISON_HPP
#define GLIAISON_LIAISON_HPP

#include <memory>

#include "gliaison/fpmod.hpp"

namespace gliaison {

// Arithmetically Gorenstein ambient X ⊆ P^n, cut out by I_X (zero for P^n).
struct AmbientScheme {
  RingPtr S;
  Ideal IX;
  RingCtx R;
  Classification cls;  // of I_X; zero ideal handled separately
  int dim = 0;         // projective dimension of X
  int ell = 0;         // ω_X = O_X(ell)
  int codim = 0;       // of X in P^n
};
using AmbientPtr = std::shared_ptr<const AmbientScheme>;

// errors unless I_X is saturated and AG (zero ideal allowed); ell computed
// as Σdeg - n - 1 when I_X is a complete intersection, else must be supplied
AmbientPtr make_ambient(RingPtr S, Ideal IX);
AmbientPtr make_ambient(RingPtr S, Ideal IX, int ell);

struct Subscheme {
  AmbientPtr X;
  Ideal I;  // saturated, contains I_X

  int codim_in_x() const;
  long degree() const { return scheme_degree(I); }
};

Subscheme make_subscheme(AmbientPtr X, Ideal I);

// --- linkage -----------------------------------------------------------------

struct LinkCheck {
  bool ok = false;
  bool containment = false;
  bool codim_ok = false;
  bool double_quotient_ok = false;
  bool degree_ok = false;
  long deg_c = 0, deg_c2 = 0, deg_y = 0;
  std::string note;
};

// C' with I_C' = sat(I_Y : I_C); precondition I_X ⊆ I_Y ⊆ I_C, Y codim 2 in X
Subscheme link(const Subscheme& C, const Ideal& IY);
LinkCheck verify_link(const Subscheme& C, const Subscheme& C2, const Ideal& IY);

// I_X + (f,g) with f,g random in the graded pieces of I_C, certified codim 2;
// deterministic under seed, bounded retries
Ideal random_ci_in_x_containing(const Subscheme& C, int a, int b, uint64_t seed);

// --- E-type / N-type resolutions ----------------------------------------------

// 0 -> A --alpha--> B --eps--> I_C(t) -> 0 at module level over S(X).
// alpha is a cover-level matrix; eps holds the values of B's generators in R.
struct ResolutionOfIdeal {
  enum class Kind { EType, NType, Plain };
  Kind kind = Kind::Plain;
  FPModule A, B;
  GradedMatrix alpha;
  std::vector<Poly> eps;
  int twist = 0;  // eps[i] ∈ (I_C)_{tw_B[i] + twist}
  bool certified = false;
  std::string cert_note;
};

// degreewise exactness of the sequence against the ideal, inside the window
bool certify_resolution(const ResolutionOfIdeal& res, const Subscheme& C,
                        int window_pad = 6);

ResolutionOfIdeal etype_resolution(const Subscheme& C);
// via the syzygy-dual construction from the E-type resolution
ResolutionOfIdeal ntype_resolution(const Subscheme& C);
// enlarge an N-type resolution by a free rank-2 block R(-u)^2
ResolutionOfIdeal enlarge_ntype(const ResolutionOfIdeal& res, int u);

// --- Rao module ---------------------------------------------------------------

// M_C = H^1_*(I_C) by graded local duality; LimitError when not finite length
FiniteLengthModule rao_module(const Subscheme& C);

// --- mapping cone under liaison -------------------------------------------------

// Common engine: given a resolution of I_C and the two-term resolution
// 0 -> R(-c) --alphaY--> B_Y --epsY--> I_Y -> 0 of the linking scheme,
// produce the dual-cone resolution of the linked ideal. E- and N-kinds flip.
struct LinkingResolution {
  FPModule BY;                 // rank-2: free (CI case) or MCM (AG case)
  std::vector<Poly> alphaY;    // the column R(-c) -> B_Y on covers
  std::vector<Poly> epsY;      // values of B_Y generators in I_Y
  int c = 0;                   // twist of the left term
  Ideal IY;
};

LinkingResolution ci_linking_resolution(const AmbientPtr& X, const Poly& f,
                                        const Poly& g);

ResolutionOfIdeal dual_cone_link(const ResolutionOfIdeal& resC,
                                 const LinkingResolution& resY,
                                 const Subscheme& C);

// Prop 2.13 specialization: Y a complete intersection (a,b) in X
ResolutionOfIdeal mapping_cone_link(const Subscheme& C,
                                    const ResolutionOfIdeal& resC,
                                    const Poly& f, const Poly& g);

// Prop 3.2: Y arising from a section of a rank-2 MCM sheaf; output is the
// N-type resolution with the fibered-sum middle term
ResolutionOfIdeal gliaison_transform(const Subscheme& C,
                                     const ResolutionOfIdeal& resC,
                                     const LinkingResolution& resY);

// --- sections of rank-2 modules ----------------------------------------------

// scheme cut out by a section s ∈ E_d of a rank-2 module, via the evaluation
// ideal of Hom(E,R) at s; returns the subscheme and its two-term resolution
struct SectionScheme {
  Subscheme Y;
  LinkingResolution res;
};
std::optional<SectionScheme> scheme_from_section(const AmbientPtr& X,
                                                 const FPModule& E,
                                                 const std::vector<Poly>& section);

// random section of E in degree d whose scheme certifies AG of codimension 2
SectionScheme ag_scheme_from_section_generic(const AmbientPtr& X,
                                             const FPModule& E, int d,
                                             uint64_t seed);

// random AG section scheme through C: the section is drawn from the linear
// subspace of sections whose evaluation ideal lies inside I_C
std::optional<SectionScheme> ag_section_scheme_through(const Subscheme& C,
                                                       const FPModule& E, int d,
                                                       uint64_t seed);

// --- traces -------------------------------------------------------------------

struct TraceStep {
  enum class Kind { CiLink, AgLink, EvenClass };
  Kind kind = Kind::CiLink;
  Ideal IY;          // empty for EvenClass
  Ideal before, after;
  LinkCheck check;   // for link steps
  std::string note;
};

struct LiaisonTrace {
  AmbientPtr X;
  std::vector<TraceStep> steps;
};

// re-run the verification of every step
bool replay_trace(const LiaisonTrace& trace, std::string* why = nullptr);

// --- Prop 3.4 peel ------------------------------------------------------------

struct PeelResult {
  Subscheme D;
  ResolutionOfIdeal resD;      // 0 -> R(-b)^{r'-1} -> N' -> I_D(a) -> 0
  std::vector<TraceStep> steps;  // even-class certificate + the two links
};

// N-type resolution of C with N = E ⊕ N' split as a direct sum (E first
// block, rank 2); produces D with N-type module N' in the same even
// G-liaison class, realizing the two links of the construction.
PeelResult peel_descend(const Subscheme& C, const ResolutionOfIdeal& resC,
                        const FPModule& E, const FPModule& Nprime,
                        uint64_t seed);

// scheme-theoretic intersection test: sat(I_Y + I_Z) = I_C
bool intersection_split_check(const Subscheme& C, const Ideal& Ydiv,
                              const Ideal& Zdiv);

// is I_C a complete intersection in X (two generators modulo I_X, codim 2)
bool is_ci_in_x(const Subscheme& C);

// extract a twisted-ideal embedding of coker(cols) ⊆ N: a hom ψ: N -> R(a)
// vanishing on the columns, with codim-2 image; scans candidate twists
struct IdealExtraction {
  Ideal I;              // saturated, contains I_X
  std::vector<Poly> psi;  // values on N's generators
  int twist = 0;
};
std::optional<IdealExtraction> extract_twisted_ideal(
    const AmbientPtr& X, const FPModule& N, const GradedMatrix& cols,
    uint64_t seed);

}  // namespace gliaison

#endif
