#include "gliaison/jsonio.hpp"

#include "gliaison/parse.hpp"

namespace gliaison {

json ideal_to_json(const Ideal& I) {
  json a = json::array();
  for (const auto& g : I.gens()) a.push_back(poly_to_string(g));
  return a;
}

json betti_to_json(const BettiTable& t) {
  json b = json::object();
  for (const auto& [k, v] : t.b)
    b[std::to_string(k.first) + "," + std::to_string(k.second)] = v;
  json out;
  out["betti"] = b;
  if (t.periodic_from) out["periodic_from"] = *t.periodic_from;
  return out;
}

json hf_to_json(const std::map<int, long>& hf) {
  json out = json::object();
  for (const auto& [d, v] : hf) out[std::to_string(d)] = v;
  return out;
}

json classification_to_json(const Classification& c) {
  json out;
  out["empty"] = c.empty;
  out["zero"] = c.zero;
  out["is_CM"] = c.is_CM;
  out["is_AG"] = c.is_AG;
  out["is_CI"] = c.is_CI;
  out["codim"] = c.codim;
  out["pd"] = c.pd;
  out["min_gens"] = c.min_gens;
  return out;
}

json link_check_to_json(const LinkCheck& c) {
  json out;
  out["ok"] = c.ok;
  out["containment"] = c.containment;
  out["codim_ok"] = c.codim_ok;
  out["double_quotient_ok"] = c.double_quotient_ok;
  out["degree_ok"] = c.degree_ok;
  out["deg_c"] = c.deg_c;
  out["deg_c_linked"] = c.deg_c2;
  out["deg_y"] = c.deg_y;
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

json flm_to_json(const FiniteLengthModule& m) {
  json dims = json::object();
  for (size_t k = 0; k < m.dims.size(); ++k)
    if (m.dims[k]) dims[std::to_string(m.dmin + (int)k)] = m.dims[k];
  json mult = json::array();
  for (int v = 0; v < m.nvars; ++v) {
    json per_var = json::array();
    for (size_t k = 0; k + 1 < m.dims.size(); ++k) {
      const FpMat& M = m.mult[v][k];
      json rows = json::array();
      for (int i = 0; i < M.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols; ++j) row.push_back(M.at(i, j));
        rows.push_back(row);
      }
      per_var.push_back(rows);
    }
    mult.push_back(per_var);
  }
  json out;
  out["dims"] = dims;
  out["total_dim"] = m.total_dim();
  out["mult"] = mult;
  return out;
}

json matrix_to_json(const GradedMatrix& M) {
  json out;
  out["rows"] = M.rows();
  out["cols"] = M.cols();
  out["row_twists"] = M.dst.tw;
  out["col_twists"] = M.src.tw;
  json e = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(poly_to_string(M.e[i][j]));
    e.push_back(row);
  }
  out["entries"] = e;
  return out;
}

json resolution_to_json(const FreeResolution& res) {
  json out;
  out["length"] = res.length();
  out["finite"] = res.finite;
  out["minimal"] = res.minimal;
  out["f0_twists"] = res.F0.tw;
  json steps = json::array();
  for (const auto& d : res.steps) steps.push_back(matrix_to_json(d));
  out["steps"] = steps;
  if (res.periodic_from) out["periodic_from"] = *res.periodic_from;
  return out;
}

json ideal_resolution_to_json(const ResolutionOfIdeal& res) {
  json out;
  out["kind"] = res.kind == ResolutionOfIdeal::Kind::EType   ? "E-type"
                : res.kind == ResolutionOfIdeal::Kind::NType ? "N-type"
                                                             : "plain";
  out["certified"] = res.certified;
  out["cert_note"] = res.cert_note;
  out["twist"] = res.twist;
  out["A_cover_twists"] = res.A.cover().tw;
  out["B_cover_twists"] = res.B.cover().tw;
  out["A_presentation"] = matrix_to_json(res.A.pres);
  out["B_presentation"] = matrix_to_json(res.B.pres);
  out["alpha"] = matrix_to_json(res.alpha);
  json eps = json::array();
  for (const auto& f : res.eps) eps.push_back(poly_to_string(f));
  out["eps"] = eps;
  return out;
}

json decomposition_to_json(const MCMDecomposition& d) {
  json out;
  out["free_twists"] = d.free_twists;
  json s = json::array();
  for (const auto& x : d.summands)
    s.push_back(json{{"label", x.label}, {"twist", x.twist}});
  out["summands"] = s;
  out["certified"] = d.certified;
  out["note"] = d.note;
  return out;
}

json even_class_to_json(const EvenClassReport& r) {
  json out;
  out["verdict"] = r.verdict == EvenClassReport::Verdict::Same        ? "same"
                   : r.verdict == EvenClassReport::Verdict::Different ? "different"
                                                                      : "undecided";
  if (r.shift) out["shift"] = *r.shift;
  json a = json::object(), b = json::object();
  for (auto [d, v] : r.rao1) a[std::to_string(d)] = v;
  for (auto [d, v] : r.rao2) b[std::to_string(d)] = v;
  out["rao_1"] = a;
  out["rao_2"] = b;
  out["note"] = r.note;
  return out;
}

json trace_to_json(const LiaisonTrace& t, const Ideal& final_ideal,
                   bool reached_ci, uint64_t seed) {
  json out;
  out["schema"] = "gliaison-trace-v1";
  json ring;
  ring["p"] = t.X->S->p;
  ring["vars"] = t.X->S->vars;
  out["ring"] = ring;
  out["ambient"] = ideal_to_json(t.X->IX);
  out["seed"] = seed;
  out["reached_ci"] = reached_ci;
  out["final"] = ideal_to_json(final_ideal);
  json steps = json::array();
  for (const auto& st : t.steps) {
    json s;
    s["kind"] = st.kind == TraceStep::Kind::CiLink   ? "ci_link"
                : st.kind == TraceStep::Kind::AgLink ? "ag_link"
                                                     : "even_class";
    s["before"] = ideal_to_json(st.before);
    s["after"] = ideal_to_json(st.after);
    if (st.kind != TraceStep::Kind::EvenClass) {
      s["linking_ideal"] = ideal_to_json(st.IY);
      s["check"] = link_check_to_json(st.check);
    }
    s["note"] = st.note;
    steps.push_back(std::move(s));
  }
  out["steps"] = steps;
  return out;
}

ReplayResult replay_trace_json(const json& j) {
  ReplayResult r;
  try {
    if (j.at("schema") != "gliaison-trace-v1") {
      r.why = "unknown schema";
      return r;
    }
    int64_t p = j.at("ring").at("p").get<int64_t>();
    std::vector<std::string> vars =
        j.at("ring").at("vars").get<std::vector<std::string>>();
    RingPtr S = PolyRing::make(p, vars);
    auto parse_ideal = [&](const json& a) {
      std::vector<Poly> gens;
      for (const auto& s : a) gens.push_back(parse_poly(s.get<std::string>(), S));
      return Ideal(S, std::move(gens));
    };
    AmbientPtr X = make_ambient(S, parse_ideal(j.at("ambient")));
    LiaisonTrace t;
    t.X = X;
    for (const auto& s : j.at("steps")) {
      TraceStep st;
      std::string kind = s.at("kind").get<std::string>();
      st.kind = kind == "ci_link"   ? TraceStep::Kind::CiLink
                : kind == "ag_link" ? TraceStep::Kind::AgLink
                                    : TraceStep::Kind::EvenClass;
      st.before = parse_ideal(s.at("before"));
      st.after = parse_ideal(s.at("after"));
      if (st.kind != TraceStep::Kind::EvenClass)
        st.IY = parse_ideal(s.at("linking_ideal"));
      t.steps.push_back(std::move(st));
    }
    std::string why;
    r.ok = replay_trace(t, &why);
    r.why = why;
    if (r.ok && j.contains("reached_ci") && j.at("reached_ci").get<bool>()) {
      Subscheme fin = make_subscheme(X, parse_ideal(j.at("final")));
      if (!is_ci_in_x(fin)) {
        r.ok = false;
        r.why = "final ideal is not a complete intersection in X";
      }
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.why = std::string("replay failed: ") + e.what();
  }
  return r;
}

}  // namespace gliaison
