#include "gliaison/cli.hpp"

#include <fstream>
#include <sstream>

#include "gliaison/jsonio.hpp"
#include "gliaison/parse.hpp"

namespace gliaison {

namespace {

constexpr const char* kUsage =
    "usage: liaison <verb> [flags]\n"
    "verbs:\n"
    "  gb         reduced Groebner basis of --curve\n"
    "  hf         Hilbert function of S/I over --window\n"
    "  betti      Betti table of the minimal free resolution\n"
    "  res        minimal free resolution (matrix blocks)\n"
    "  classify   CM / AG / CI classification\n"
    "  link       link --curve by the CI ideal --by\n"
    "  rao        Rao module of --curve in --ambient\n"
    "  etype      E-type resolution of --curve\n"
    "  ntype      N-type resolution of --curve\n"
    "  cone       mapping-cone resolution of the link (--by or --degrees)\n"
    "  gtransform N-type transform under a G-link by a spinor section\n"
    "  peel       one rank-2 peel step (quadric threefold)\n"
    "  mcm        MCM decomposition of --matrix over --ambient\n"
    "  spinor     spinor matrix factorization of the ambient quadric\n"
    "  descend    glicci descent; writes a trace with --out\n"
    "  evenclass  even G-liaison comparison of --curve and --with\n"
    "  splitcheck scheme-theoretic intersection test (--by, --with divisors)\n"
    "  replay     re-verify a trace file (--trace)\n"
    "flags: --file F --ambient X --curve C --by Y --with Z --matrix M\n"
    "       --degrees a,b --seed n --window lo,hi --max-steps n\n"
    "       --format json|text --out PATH --trace PATH\n";

struct Args {
  std::string verb;
  std::map<std::string, std::string> flags;

  bool has(const std::string& k) const { return flags.count(k) > 0; }
  std::string get(const std::string& k, const std::string& dflt = "") const {
    auto it = flags.find(k);
    return it == flags.end() ? dflt : it->second;
  }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Args parse_args(const std::vector<std::string>& argv) {
  Args a;
  if (argv.empty()) throw UsageError("missing verb");
  a.verb = argv[0];
  for (size_t i = 1; i < argv.size(); ++i) {
    const std::string& s = argv[i];
    if (s.rfind("--", 0) != 0) throw UsageError("unexpected argument: " + s);
    if (i + 1 >= argv.size()) throw UsageError("flag " + s + " needs a value");
    a.flags[s.substr(2)] = argv[++i];
  }
  return a;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::pair<int, int> parse_pair(const std::string& s, const char* what) {
  auto comma = s.find(',');
  if (comma == std::string::npos)
    throw UsageError(std::string(what) + " needs two comma-separated integers");
  return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

struct Session {
  ParsedFile file;
  AmbientPtr X;
  uint64_t seed = 0;
  std::string format = "json";

  Subscheme curve(const Args& a, const std::string& flag = "curve") const {
    if (!a.has(flag)) throw UsageError("missing --" + flag);
    return make_subscheme(X, file.ideal(a.get(flag)));
  }
};

Session open_session(const Args& a, bool need_ambient) {
  Session s;
  if (!a.has("file")) throw UsageError("missing --file");
  s.file = parse_file(slurp(a.get("file")));
  s.seed = a.has("seed") ? std::stoull(a.get("seed")) : 0;
  s.format = a.get("format", "json");
  if (need_ambient) {
    if (!a.has("ambient")) throw UsageError("missing --ambient");
    s.X = make_ambient(s.file.ring, s.file.ideal(a.get("ambient")));
  }
  return s;
}

json header(const std::string& verb, uint64_t seed) {
  json j;
  j["schema_version"] = "1";
  j["command"] = verb;
  j["seed"] = seed;
  j["caps"] = {{"max_pair_degree", default_caps().max_pair_degree},
               {"max_pairs", default_caps().max_pairs}};
  return j;
}

void emit(CliResult& r, const Session& s, const json& j) {
  if (s.format == "json") {
    r.out = j.dump(2) + "\n";
  } else {
    // text: a compact rendering of the same data
    std::ostringstream os;
    os << j.dump(2) << "\n";
    r.out = os.str();
  }
}

std::pair<Poly, Poly> ci_forms(const Session& s, const Args& a,
                               const Subscheme& C) {
  if (a.has("by")) {
    const Ideal& IY = s.file.ideal(a.get("by"));
    std::vector<Poly> extra;
    for (const auto& g : IY.gens())
      if (!ideal_contains(s.X->IX, g)) extra.push_back(g);
    if (extra.size() != 2)
      throw UsageError("--by must name a CI ideal with two forms beyond I_X");
    return {extra[0], extra[1]};
  }
  if (!a.has("degrees")) throw UsageError("need --by or --degrees a,b");
  auto [da, db] = parse_pair(a.get("degrees"), "--degrees");
  Ideal IY = random_ci_in_x_containing(C, da, db, s.seed);
  std::vector<Poly> extra;
  for (const auto& g : IY.gens())
    if (!ideal_contains(s.X->IX, g)) extra.push_back(g);
  if (extra.size() < 2) throw UsageError("random CI did not yield two forms");
  return {extra[0], extra[1]};
}

CliResult dispatch(const Args& a) {
  CliResult r;

  if (a.verb == "replay") {
    if (!a.has("trace")) throw UsageError("missing --trace");
    json j = json::parse(slurp(a.get("trace")));
    ReplayResult rr = replay_trace_json(j);
    json out = header("replay", 0);
    out["ok"] = rr.ok;
    if (!rr.why.empty()) out["why"] = rr.why;
    r.out = out.dump(2) + "\n";
    r.exit_code = rr.ok ? 0 : 1;
    return r;
  }

  if (a.verb == "gb" || a.verb == "hf" || a.verb == "betti" ||
      a.verb == "res" || a.verb == "classify") {
    Session s = open_session(a, false);
    if (!a.has("curve")) throw UsageError("missing --curve");
    const Ideal& I = s.file.ideal(a.get("curve"));
    json out = header(a.verb, s.seed);
    if (a.verb == "gb") {
      json g = json::array();
      for (const auto& f : I.gb()) g.push_back(poly_to_string(f));
      out["gb"] = g;
    } else if (a.verb == "hf") {
      int lo = 0, hi = 10;
      if (a.has("window")) std::tie(lo, hi) = parse_pair(a.get("window"), "--window");
      out["hf"] = hf_to_json(hilbert_function(I, lo, hi));
    } else if (a.verb == "betti" || a.verb == "res") {
      FreeResolution res = resolve_cyclic(I);
      out["betti"] = betti_to_json(betti(res));
      if (a.verb == "res") {
        out["resolution"] = resolution_to_json(res);
        std::ostringstream blocks;
        blocks << emit_ring(*I.ring());
        for (int k = 0; k < res.length(); ++k)
          blocks << emit_matrix("d" + std::to_string(k + 1), res.steps[k]);
        out["file_format"] = blocks.str();
      }
    } else {
      out["classification"] = classification_to_json(classify(I));
    }
    emit(r, s, out);
    return r;
  }

  Session s = open_session(a, true);
  json out = header(a.verb, s.seed);

  if (a.verb == "link") {
    Subscheme C = s.curve(a);
    if (!a.has("by")) throw UsageError("missing --by");
    const Ideal& IY = s.file.ideal(a.get("by"));
    Subscheme C2 = link(C, IY);
    LinkCheck chk = verify_link(C, C2, IY);
    out["linked"] = ideal_to_json(C2.I);
    out["check"] = link_check_to_json(chk);
    emit(r, s, out);
    r.exit_code = chk.ok ? 0 : 1;
  } else if (a.verb == "rao") {
    Subscheme C = s.curve(a);
    FiniteLengthModule m = rao_module(C);
    out["rao"] = flm_to_json(m);
    emit(r, s, out);
  } else if (a.verb == "etype" || a.verb == "ntype") {
    Subscheme C = s.curve(a);
    ResolutionOfIdeal res =
        a.verb == "etype" ? etype_resolution(C) : ntype_resolution(C);
    out["resolution"] = ideal_resolution_to_json(res);
    emit(r, s, out);
    r.exit_code = res.certified ? 0 : 1;
  } else if (a.verb == "cone") {
    Subscheme C = s.curve(a);
    auto [f, g] = ci_forms(s, a, C);
    ResolutionOfIdeal et = etype_resolution(C);
    ResolutionOfIdeal cone = mapping_cone_link(C, et, f, g);
    out["ci_forms"] = {poly_to_string(f), poly_to_string(g)};
    out["resolution"] = ideal_resolution_to_json(cone);
    Ideal IY = saturate_irrelevant(ideal_sum(C.X->IX, Ideal(C.X->S, {f, g})));
    out["linked"] = ideal_to_json(link(C, IY).I);
    emit(r, s, out);
    r.exit_code = cone.certified ? 0 : 1;
  } else if (a.verb == "gtransform") {
    Subscheme C = s.curve(a);
    auto Q3 = try_quadric3(s.X);
    if (!Q3) throw UsageError("gtransform needs a smooth quadric threefold ambient");
    int d = a.has("degrees") ? std::stoi(a.get("degrees")) : 1;
    ResolutionOfIdeal nt = ntype_resolution(C);
    auto sch = ag_section_scheme_through(C, Q3->spin, d, s.seed);
    if (!sch) {
      out["error"] = "no AG section scheme through the curve in degree " +
                     std::to_string(d);
      emit(r, s, out);
      r.exit_code = 1;
      return r;
    }
    ResolutionOfIdeal res = gliaison_transform(C, nt, sch->res);
    out["linking_ideal"] = ideal_to_json(sch->Y.I);
    out["resolution"] = ideal_resolution_to_json(res);
    emit(r, s, out);
    r.exit_code = res.certified ? 0 : 1;
  } else if (a.verb == "peel" || a.verb == "descend") {
    Subscheme C = s.curve(a);
    DescentOptions opt;
    opt.seed = s.seed;
    opt.max_steps = a.has("max-steps") ? std::stoi(a.get("max-steps"))
                    : a.verb == "peel" ? 1
                                       : 12;
    DescentResult res = glicci_descent(C, opt);
    json tj = trace_to_json(res.trace, res.final_ideal, res.reached_ci, s.seed);
    out["reached_ci"] = res.reached_ci;
    out["final"] = ideal_to_json(res.final_ideal);
    out["steps"] = tj["steps"];
    if (!res.obstruction.empty()) out["obstruction"] = res.obstruction;
    if (a.has("out")) {
      std::ofstream f(a.get("out"));
      f << tj.dump(2) << "\n";
      out["trace_file"] = a.get("out");
    }
    emit(r, s, out);
    r.exit_code = a.verb == "descend" && !res.reached_ci ? 1 : 0;
  } else if (a.verb == "mcm") {
    auto Q3 = try_quadric3(s.X);
    if (!Q3) throw UsageError("mcm needs a smooth quadric threefold ambient");
    if (!a.has("matrix")) throw UsageError("missing --matrix");
    FPModule M = fp_from_presentation(s.X->R, s.file.matrix(a.get("matrix")));
    MCMDecomposition dec = mcm_decompose(M, {{"Spin", Q3->spin}}, s.seed + 1);
    out["decomposition"] = decomposition_to_json(dec);
    emit(r, s, out);
    r.exit_code = dec.certified ? 0 : 1;
  } else if (a.verb == "spinor") {
    auto Q3 = try_quadric3(s.X);
    if (!Q3) throw UsageError("spinor needs a smooth quadric threefold ambient");
    out["A"] = matrix_to_json(Q3->mf.A);
    out["B"] = matrix_to_json(Q3->mf.B);
    out["file_format"] = emit_ring(*s.X->S) + emit_matrix("A", Q3->mf.A) +
                         emit_matrix("B", Q3->mf.B);
    emit(r, s, out);
  } else if (a.verb == "evenclass") {
    Subscheme C1 = s.curve(a);
    if (!a.has("with")) throw UsageError("missing --with");
    Subscheme C2 = s.curve(a, "with");
    EvenClassReport rep = decide_even_class(C1, C2);
    out["report"] = even_class_to_json(rep);
    emit(r, s, out);
    r.exit_code = rep.verdict == EvenClassReport::Verdict::Undecided ? 1 : 0;
  } else if (a.verb == "splitcheck") {
    Subscheme C = s.curve(a);
    if (!a.has("by") || !a.has("with"))
      throw UsageError("splitcheck needs --by and --with divisor ideals");
    bool split = intersection_split_check(C, s.file.ideal(a.get("by")),
                                          s.file.ideal(a.get("with")));
    out["splits"] = split;
    emit(r, s, out);
  } else {
    throw UsageError("unknown verb: " + a.verb);
  }
  return r;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& argv) {
  CliResult r;
  try {
    Args a = parse_args(argv);
    if (a.verb == "help" || a.verb == "--help") {
      r.out = kUsage;
      return r;
    }
    return dispatch(a);
  } catch (const UsageError& e) {
    r.err = std::string("error: ") + e.what() + "\n" + kUsage;
    r.exit_code = 2;
  } catch (const ParseError& e) {
    r.err = std::string("error: ") + e.what() + "\n";
    r.exit_code = 2;
  } catch (const std::invalid_argument& e) {
    r.err = std::string("error: ") + e.what() + "\n";
    r.exit_code = 2;
  } catch (const LimitError& e) {
    r.err = std::string("resource limit: ") + e.what() + "\n";
    r.exit_code = 1;
  } catch (const std::exception& e) {
    r.err = std::string("internal error: ") + e.what() + "\n";
    r.exit_code = 1;
  }
  return r;
}

}  // namespace gliaison
