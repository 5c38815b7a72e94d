#include "gliaison/parse.hpp"

#include <cctype>
#include <sstream>

namespace gliaison {

const Ideal& ParsedFile::ideal(const std::string& name) const {
  for (const auto& [n, I] : ideals)
    if (n == name) return I;
  throw std::invalid_argument("no ideal named '" + name + "' in input");
}

bool ParsedFile::has_ideal(const std::string& name) const {
  for (const auto& [n, I] : ideals)
    if (n == name) return true;
  return false;
}

const GradedMatrix& ParsedFile::matrix(const std::string& name) const {
  for (const auto& [n, M] : matrices)
    if (n == name) return M;
  throw std::invalid_argument("no matrix named '" + name + "' in input");
}

bool ParsedFile::has_matrix(const std::string& name) const {
  for (const auto& [n, M] : matrices)
    if (n == name) return true;
  return false;
}

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  int line = 1, col = 1;

  bool eof() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  char get() {
    char c = s[i++];
    if (c == '\n') { ++line; col = 1; } else { ++col; }
    return c;
  }
  void skip_spaces() {  // spaces and comments, not newlines
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        get();
      } else {
        break;
      }
    }
  }
  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      if (!eof() && peek() == '\n') get();
      else break;
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }
};

bool name_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

std::string read_name(Cursor& c) {
  c.skip_spaces();
  if (c.eof() || !std::isalpha((unsigned char)c.peek())) c.fail("expected a name");
  std::string n;
  while (!c.eof() && name_char(c.peek())) n.push_back(c.get());
  return n;
}

int64_t read_int(Cursor& c) {
  c.skip_spaces();
  bool neg = false;
  if (!c.eof() && (c.peek() == '-' || c.peek() == '+')) neg = c.get() == '-';
  if (c.eof() || !std::isdigit((unsigned char)c.peek())) c.fail("expected an integer");
  int64_t v = 0;
  while (!c.eof() && std::isdigit((unsigned char)c.peek())) {
    v = v * 10 + (c.get() - '0');
    if (v > (int64_t(1) << 40)) c.fail("integer literal too large");
  }
  return neg ? -v : v;
}

void expect_newline(Cursor& c) {
  c.skip_spaces();
  if (c.eof()) return;
  if (c.peek() != '\n') c.fail("expected end of line");
  c.get();
}

// poly := term (('+'|'-') term)* ; term := factor ('*' factor)*
// factor := INT | NAME ('^' INT)?
Poly read_poly_line(Cursor& c, const RingPtr& R) {
  Poly acc = poly_zero(R);
  int sign = 1;
  c.skip_spaces();
  if (!c.eof() && (c.peek() == '+' || c.peek() == '-'))
    sign = c.get() == '-' ? -1 : 1;
  for (;;) {
    // one term
    int64_t coeff = 1;
    Monomial m = mono_one(R->nvars());
    bool any_factor = false;
    for (;;) {
      c.skip_spaces();
      if (c.eof()) break;
      char ch = c.peek();
      if (std::isdigit((unsigned char)ch)) {
        coeff = fp_mul(fp_norm(coeff, R->p), fp_norm(read_int(c), R->p), R->p);
        any_factor = true;
      } else if (std::isalpha((unsigned char)ch)) {
        int sl = c.line, sc = c.col;
        std::string n = read_name(c);
        int vi = R->var_index(n);
        if (vi < 0) throw ParseError("unknown variable '" + n + "'", sl, sc);
        int e = 1;
        c.skip_spaces();
        if (!c.eof() && c.peek() == '^') {
          c.get();
          int64_t ev = read_int(c);
          if (ev < 0) c.fail("negative exponent");
          e = (int)ev;
        }
        m.e[vi] += (uint16_t)e;
        any_factor = true;
      } else {
        break;
      }
      c.skip_spaces();
      if (!c.eof() && c.peek() == '*') { c.get(); continue; }
      break;
    }
    if (!any_factor) c.fail("expected a term");
    int64_t cc = fp_norm(sign * fp_norm(coeff, R->p), R->p);
    acc = poly_add(acc, poly_from_terms(R, {{cc, m}}));
    c.skip_spaces();
    if (!c.eof() && (c.peek() == '+' || c.peek() == '-')) {
      sign = c.get() == '-' ? -1 : 1;
      continue;
    }
    break;
  }
  return acc;
}

std::string poly_degrees(const Poly& f) {
  std::ostringstream os;
  std::vector<int> degs;
  for (const auto& t : f.ts) {
    int d = t.m.deg();
    bool seen = false;
    for (int x : degs) seen |= (x == d);
    if (!seen) degs.push_back(d);
  }
  os << "{";
  for (size_t i = 0; i < degs.size(); ++i) os << (i ? "," : "") << degs[i];
  os << "}";
  return os.str();
}

}  // namespace

ParsedFile parse_file(const std::string& text) {
  Cursor c{text};
  ParsedFile out;
  c.skip_blank_lines();
  {
    int sl = c.line, sc = c.col;
    std::string kw = read_name(c);
    if (kw != "ring") throw ParseError("expected 'ring' declaration", sl, sc);
    int64_t p = read_int(c);
    if (!is_prime(p))
      throw ParseError("characteristic " + std::to_string(p) + " is not prime",
                       sl, sc);
    std::vector<std::string> vars;
    for (;;) {
      c.skip_spaces();
      if (c.eof() || c.peek() == '\n') break;
      vars.push_back(read_name(c));
    }
    if (vars.empty()) c.fail("ring needs at least one variable");
    try {
      out.ring = PolyRing::make(p, vars);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), sl, sc);
    }
    expect_newline(c);
  }

  for (;;) {
    c.skip_blank_lines();
    if (c.eof()) break;
    int sl = c.line, sc = c.col;
    std::string kw = read_name(c);
    if (kw == "ideal") {
      std::string name = read_name(c);
      expect_newline(c);
      std::vector<Poly> gens;
      for (;;) {
        c.skip_blank_lines();
        if (c.eof()) c.fail("unterminated ideal block (missing 'end')");
        size_t save_i = c.i; int save_l = c.line, save_c = c.col;
        if (std::isalpha((unsigned char)c.peek())) {
          std::string maybe_end = read_name(c);
          if (maybe_end == "end") { expect_newline(c); break; }
          c.i = save_i; c.line = save_l; c.col = save_c;
        }
        int pl = c.line, pc = c.col;
        Poly f = read_poly_line(c, out.ring);
        expect_newline(c);
        if (f.is_zero()) continue;
        if (!f.is_homogeneous())
          throw ParseError("inhomogeneous generator " + poly_to_string(f) +
                               " (degrees " + poly_degrees(f) + ")",
                           pl, pc);
        gens.push_back(std::move(f));
      }
      out.ideals.emplace_back(name, Ideal(out.ring, std::move(gens)));
    } else if (kw == "matrix") {
      std::string name = read_name(c);
      std::string kw2 = read_name(c);
      if (kw2 != "rows") c.fail("expected 'rows'");
      int rows = (int)read_int(c);
      std::string kw3 = read_name(c);
      if (kw3 != "cols") c.fail("expected 'cols'");
      int cols = (int)read_int(c);
      expect_newline(c);
      auto read_twists = [&](int n) {
        c.skip_blank_lines();
        std::string t = read_name(c);
        if (t != "twists") c.fail("expected 'twists'");
        std::vector<int> tw;
        for (int i = 0; i < n; ++i) tw.push_back((int)read_int(c));
        expect_newline(c);
        return tw;
      };
      std::vector<int> rtw = read_twists(rows);
      std::vector<int> ctw = read_twists(cols);
      GradedMatrix M = zero_matrix(free_mod(out.ring, ctw),
                                   free_mod(out.ring, rtw));
      for (int i = 0; i < rows; ++i) {
        c.skip_blank_lines();
        for (int j = 0; j < cols; ++j) {
          M.e[i][j] = read_poly_line(c, out.ring);
          c.skip_spaces();
          if (j + 1 < cols) {
            if (c.eof() || c.peek() != ',') c.fail("expected ','");
            c.get();
          }
        }
        expect_newline(c);
      }
      c.skip_blank_lines();
      std::string e = read_name(c);
      if (e != "end") c.fail("expected 'end'");
      expect_newline(c);
      try {
        check_graded(M);
      } catch (const std::logic_error& err) {
        throw ParseError(std::string("matrix ") + name + ": " + err.what(), sl, sc);
      }
      out.matrices.emplace_back(name, std::move(M));
    } else {
      throw ParseError("unknown declaration '" + kw + "'", sl, sc);
    }
  }
  return out;
}

Poly parse_poly(const std::string& text, const RingPtr& R) {
  Cursor c{text};
  Poly f = read_poly_line(c, R);
  c.skip_spaces();
  if (!c.eof() && c.peek() != '\n') c.fail("trailing input after polynomial");
  return f;
}

std::string emit_ring(const PolyRing& R) {
  std::ostringstream os;
  os << "ring " << R.p;
  for (const auto& v : R.vars) os << " " << v;
  os << "\n";
  return os.str();
}

std::string emit_ideal(const std::string& name, const Ideal& I) {
  std::ostringstream os;
  os << "ideal " << name << "\n";
  for (const auto& g : I.gens()) os << poly_to_string(g) << "\n";
  os << "end\n";
  return os.str();
}

std::string emit_matrix(const std::string& name, const GradedMatrix& M) {
  std::ostringstream os;
  os << "matrix " << name << " rows " << M.rows() << " cols " << M.cols() << "\n";
  os << "twists";
  for (int t : M.dst.tw) os << " " << t;
  os << "\ntwists";
  for (int t : M.src.tw) os << " " << t;
  os << "\n";
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j)
      os << (j ? ", " : "") << poly_to_string(M.e[i][j]);
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

}  // namespace gliaison
