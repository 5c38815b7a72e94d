#ifndef GLIAISON_PARSE_HPP
#define GLIAISON_PARSE_HPP

#include <string>
#include <utility>
#include <vector>

#include "gliaison/ideal.hpp"

namespace gliaison {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

struct ParsedFile {
  RingPtr ring;
  std::vector<std::pair<std::string, Ideal>> ideals;
  std::vector<std::pair<std::string, GradedMatrix>> matrices;

  const Ideal& ideal(const std::string& name) const;
  bool has_ideal(const std::string& name) const;
  const GradedMatrix& matrix(const std::string& name) const;
  bool has_matrix(const std::string& name) const;
};

// Input grammar:
//   file      := ring-decl decl*
//   ring-decl := "ring" INT NAME+ NEWLINE
//   decl      := "ideal" NAME NEWLINE (poly NEWLINE)* "end" NEWLINE
//              | "matrix" NAME "rows" INT "cols" INT NEWLINE
//                "twists" INT* NEWLINE "twists" INT* NEWLINE
//                (entry ("," entry)* NEWLINE)* "end" NEWLINE
// "#" starts a comment. One ideal generator per line.
ParsedFile parse_file(const std::string& text);

// parse a single polynomial in an existing ring (used by CLI arguments)
Poly parse_poly(const std::string& text, const RingPtr& R);

// emitters, inverse to the parser
std::string emit_ideal(const std::string& name, const Ideal& I);
std::string emit_matrix(const std::string& name, const GradedMatrix& M);
std::string emit_ring(const PolyRing& R);

}  // namespace gliaison

#endif
