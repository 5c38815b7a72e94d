#include "gliaison/descent.hpp"

#include <algorithm>
#include <sstream>

namespace gliaison {

std::optional<QuadricThreefold> try_quadric3(const AmbientPtr& X) {
  if (X->codim != 1 || X->S->nvars() != 5 || X->S->p == 2) return std::nullopt;
  Ideal T = trim(X->IX);
  if (T.gens().size() != 1 || T.gens()[0].degree() != 2) return std::nullopt;
  try {
    QuadricThreefold Q;
    Q.X = X;
    Q.mf = spinor_mf(T.gens()[0]);
    Q.spin = mf_cokernel(Q.mf, X->R);
    return Q;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

namespace {

// one spinor split of N, scanning twists
struct SpinSplit {
  FPModule T;
  SplitMaps maps;
  int twist = 0;
};

std::optional<SpinSplit> find_spin_split(const FPModule& N, const FPModule& spin,
                                         uint64_t seed) {
  if (N.cover().rank() == 0) return std::nullopt;
  int lo = N.cover().tw[0], hi = N.cover().tw[0];
  for (int t : N.cover().tw) { lo = std::min(lo, t); hi = std::max(hi, t); }
  int tlo = spin.cover().tw[0], thi = spin.cover().tw[0];
  for (int t : spin.cover().tw) { tlo = std::min(tlo, t); thi = std::max(thi, t); }
  for (int a = tlo - hi; a <= thi - lo; ++a) {
    FPModule T = fp_twist(spin, a);
    auto split = find_split(N, T, seed + 97 * (a + 40));
    if (split) return SpinSplit{T, *split, a};
  }
  return std::nullopt;
}

// rebuild an N-type resolution with middle term split as T ⊕ (N/im ι),
// transported through Θ = [ι | 1 - ι∘π]
struct SplitResolution {
  ResolutionOfIdeal res;
  FPModule T, Nprime;
};

std::optional<SplitResolution> split_ntype(const ResolutionOfIdeal& ntype,
                                           const Subscheme& C,
                                           const SpinSplit& sp) {
  const RingCtx& R = ntype.B.R;
  const FPModule& N = ntype.B;
  int rN = N.cover().rank(), rT = sp.T.cover().rank();

  // N' = N / im(ι), presented on the same cover
  FreeMod src = concat(N.pres.src, sp.maps.iota.src);
  GradedMatrix P2 = zero_matrix(src, N.cover());
  for (int i = 0; i < rN; ++i) {
    for (int j = 0; j < N.pres.cols(); ++j) P2.e[i][j] = N.pres.e[i][j];
    for (int j = 0; j < sp.maps.iota.cols(); ++j)
      P2.e[i][N.pres.cols() + j] = sp.maps.iota.e[i][j];
  }
  FPModule Nprime{R, std::move(P2), std::nullopt};

  // sigma = 1 - ι∘π : N -> N, descends to a section N' -> N
  GradedMatrix sigma = identity_matrix(N.cover());
  GradedMatrix ip = compose(sp.maps.iota, sp.maps.pi);
  for (int i = 0; i < rN; ++i)
    for (int j = 0; j < rN; ++j)
      sigma.e[i][j] = ctx_nf(poly_sub(sigma.e[i][j], ip.e[i][j]), R);

  SplitResolution out{ntype, sp.T, Nprime};
  out.res.B = fp_direct_sum(sp.T, Nprime);
  // alpha' = [π∘alpha ; alpha]
  GradedMatrix top = compose(sp.maps.pi, ntype.alpha);
  out.res.alpha = zero_matrix(ntype.alpha.src, out.res.B.cover());
  for (int i = 0; i < rT; ++i)
    for (int j = 0; j < ntype.alpha.cols(); ++j)
      out.res.alpha.e[i][j] = ctx_nf(top.e[i][j], R);
  for (int i = 0; i < rN; ++i)
    for (int j = 0; j < ntype.alpha.cols(); ++j)
      out.res.alpha.e[rT + i][j] = ntype.alpha.e[i][j];
  // eps' = [eps∘ι , eps∘sigma]
  out.res.eps.clear();
  for (int j = 0; j < rT; ++j) {
    Poly acc = poly_zero(R.S);
    for (int i = 0; i < rN; ++i)
      acc = poly_add(acc, poly_mul(ntype.eps[i], sp.maps.iota.e[i][j]));
    out.res.eps.push_back(ctx_nf(acc, R));
  }
  for (int j = 0; j < rN; ++j) {
    Poly acc = poly_zero(R.S);
    for (int i = 0; i < rN; ++i)
      acc = poly_add(acc, poly_mul(ntype.eps[i], sigma.e[i][j]));
    out.res.eps.push_back(ctx_nf(acc, R));
  }
  out.res.certified = certify_resolution(out.res, C);
  out.res.cert_note = out.res.certified ? "split middle term, window-exact"
                                        : "certification failed";
  if (!out.res.certified) return std::nullopt;
  return out;
}

}  // namespace

DescentResult glicci_descent(const Subscheme& C, const DescentOptions& opt) {
  DescentResult out;
  out.trace.X = C.X;
  auto Q3 = try_quadric3(C.X);
  Subscheme cur = C;

  for (int step = 0; step < opt.max_steps; ++step) {
    if (is_ci_in_x(cur)) {
      out.reached_ci = true;
      out.final_ideal = cur.I;
      return out;
    }
    Classification cls = classify(cur.I);
    if (!cls.is_CM) {
      std::ostringstream os;
      os << "not ACM";
      try {
        FiniteLengthModule rao = rao_module(cur);
        os << ": Rao module has total dimension " << rao.total_dim()
           << "; a G-liaison dualizes it up to twist, so no sequence of "
              "links reaches a complete intersection";
      } catch (const LimitError&) {
        os << " (deficiency module not of finite length)";
      }
      out.obstruction = os.str();
      out.final_ideal = cur.I;
      return out;
    }

    // spinor phase on the quadric threefold
    bool progressed = false;
    if (Q3) {
      ResolutionOfIdeal ntype = ntype_resolution(cur);
      if (ntype.certified) {
        auto sp = find_spin_split(ntype.B, Q3->spin, opt.seed + 11 * step);
        if (sp) {
          ResolutionOfIdeal work = ntype;
          // ensure the complement keeps rank >= 2 after removing rank 2
          if (fp_rank(ntype.B) < 4) {
            int u = 1;
            for (int t : ntype.B.cover().tw) u = std::max(u, t + 1);
            work = enlarge_ntype(ntype, u);
            sp = find_spin_split(work.B, Q3->spin, opt.seed + 11 * step + 5);
            if (!sp) sp = std::nullopt;
          }
          if (sp) {
            auto split = split_ntype(work, cur, *sp);
            if (split) {
              try {
                PeelResult peel = peel_descend(cur, split->res, split->T,
                                               split->Nprime,
                                               opt.seed + 1009 * step);
                for (auto& st : peel.steps) out.trace.steps.push_back(st);
                cur = peel.D;
                progressed = true;
              } catch (const LimitError&) {
                // fall through to the CI-link phase
              }
            }
          }
        }
      }
    }
    if (progressed) continue;

    // dissocié phase: minimal-degree CI links, accepted when they shrink
    FPModule IM = ideal_module(cur.I, C.X->R);
    std::vector<int> degs = IM.cover().tw;
    std::sort(degs.begin(), degs.end());
    if (degs.size() < 2) {
      out.obstruction = "ideal has fewer than two generators modulo I_X "
                        "but is not a complete intersection";
      out.final_ideal = cur.I;
      return out;
    }
    long cur_deg = scheme_degree(cur.I);
    int cur_gens = (int)degs.size();
    bool linked = false;
    std::vector<std::pair<int, int>> degree_plans = {
        {degs[0], degs[1]}, {degs[0], degs[1] + 1}, {degs[1], degs[1]}};
    for (auto [a, b] : degree_plans) {
      for (uint64_t s = 0; s < 4 && !linked; ++s) {
        Ideal IY;
        try {
          IY = random_ci_in_x_containing(cur, a, b, opt.seed + 53 * step + s);
        } catch (const LimitError&) {
          continue;
        }
        Subscheme C2 = link(cur, IY);
        if (C2.I.is_zero_ideal() || ideal_is_unit(C2.I)) continue;
        long d2 = scheme_degree(C2.I);
        int g2 = (int)ideal_module(C2.I, C.X->R).cover().rank();
        if (d2 > cur_deg || (d2 == cur_deg && g2 >= cur_gens)) continue;
        LinkCheck chk = verify_link(cur, C2, IY);
        if (!chk.ok) continue;
        TraceStep st;
        st.kind = TraceStep::Kind::CiLink;
        st.IY = IY;
        st.before = cur.I;
        st.after = C2.I;
        st.check = chk;
        st.note = "degree-reducing CI-link";
        out.trace.steps.push_back(std::move(st));
        cur = C2;
        linked = true;
      }
      if (linked) break;
    }
    if (!linked) {
      out.obstruction = "no degree-reducing link found within the search bound";
      out.final_ideal = cur.I;
      return out;
    }
  }
  if (is_ci_in_x(cur)) {
    out.reached_ci = true;
  } else {
    out.obstruction = "step bound exhausted";
  }
  out.final_ideal = cur.I;
  return out;
}

EvenClassReport decide_even_class(const Subscheme& C1, const Subscheme& C2) {
  EvenClassReport r;
  FiniteLengthModule a, b;
  try {
    a = rao_module(C1);
    b = rao_module(C2);
  } catch (const LimitError& e) {
    r.verdict = EvenClassReport::Verdict::Undecided;
    r.note = std::string("Rao module window failure: ") + e.what();
    return r;
  }
  for (size_t k = 0; k < a.dims.size(); ++k)
    if (a.dims[k]) r.rao1.push_back({a.dmin + (int)k, a.dims[k]});
  for (size_t k = 0; k < b.dims.size(); ++k)
    if (b.dims[k]) r.rao2.push_back({b.dmin + (int)k, b.dims[k]});
  if (a.is_zero() && b.is_zero()) {
    r.verdict = EvenClassReport::Verdict::Same;
    r.shift = 0;
    r.note = "both Rao modules vanish (ACM); same even class on the quadric";
    return r;
  }
  auto iso = flm_iso_up_to_twist(a, b);
  if (iso) {
    r.verdict = EvenClassReport::Verdict::Same;
    r.shift = *iso;
    r.note = "Rao modules isomorphic up to twist";
  } else {
    // dimension sequences that cannot be aligned give a certified negative
    FiniteLengthModule at = a, bt = b;
    std::vector<int> da, db;
    for (int d : at.dims) da.push_back(d);
    for (int d : bt.dims) db.push_back(d);
    while (!da.empty() && da.front() == 0) da.erase(da.begin());
    while (!da.empty() && da.back() == 0) da.pop_back();
    while (!db.empty() && db.front() == 0) db.erase(db.begin());
    while (!db.empty() && db.back() == 0) db.pop_back();
    if (da != db) {
      r.verdict = EvenClassReport::Verdict::Different;
      r.note = "Rao dimension sequences differ";
    } else {
      r.verdict = EvenClassReport::Verdict::Undecided;
      r.note = "aligned dimensions but no explicit isomorphism found";
    }
  }
  return r;
}

GlicciReport decide_glicci(const Subscheme& C, uint64_t seed) {
  GlicciReport r;
  Classification cls = classify(C.I);
  r.is_acm = cls.is_CM;
  if (!r.is_acm) {
    r.note = "not ACM: outside the scope of the glicci criterion";
    return r;
  }
  auto Q3 = try_quadric3(C.X);
  if (!Q3) {
    r.note = "ambient is not a smooth quadric threefold";
    return r;
  }
  ResolutionOfIdeal ntype = ntype_resolution(C);
  if (!ntype.certified) {
    r.note = "N-type resolution failed certification";
    return r;
  }
  r.dec = mcm_decompose(ntype.B, {{"Spin", Q3->spin}}, seed);
  r.certificate = r.dec.certified;
  r.note = r.certificate
               ? "N-type module is a split sum of spinor twists and frees "
                 "(double-layered certificate)"
               : "decomposition incomplete: " + r.dec.note;
  return r;
}

}  // namespace gliaison
