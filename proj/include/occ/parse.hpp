#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "occ/syntax.hpp"

namespace occ {

// Binders that shadow an enclosing binder or a free variable of the program
// are renamed to `name'N`, together with the annotations that refer to them.
struct ParsedProgram {
  std::string source;
  Term term;
  std::vector<std::string> free;  // free variables, first occurrence first
  std::vector<std::pair<std::string, std::string>> renamed;  // original, new
};

// Throws SyntaxError with a location.
ParsedProgram parse_program(std::string_view src);
Term parse_term(std::string_view src);
Type parse_type(std::string_view src);

}  // namespace occ
