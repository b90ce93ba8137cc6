#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "distinguo/formula.hpp"
#include "distinguo/structure.hpp"

namespace distinguo {

// Structure documents. Grammar, one item per line:
//
//   sig R:1 S:2 [eq]          signature: name:arity pairs, optional eq marker
//   finite 3 | periodic       backend; finite carries the universe size
//   R = {0,2}                 finite unary interpretation
//   S = {(0,1),(2,0)}         finite interpretation, arity >= 2
//   R = prefix:110 cycle:01   periodic interpretation
//
// Every relation appears exactly once after the backend line. Blank lines and
// lines starting with # are ignored on input and never produced on output.
// The serializer is canonical: interpretations in signature order, tuples in
// ascending order, periodic sets in normal form, no extra whitespace.
Structure parse_structure_doc(std::string_view text);
std::string serialize_structure_doc(const Structure& s);

// Formula list files: one formula per line, # comments and blank lines
// ignored. Duplicates are kept; callers wanting a set deduplicate.
std::vector<Formula> parse_formula_lines(std::string_view text,
                                         const Signature& sig);

}  // namespace distinguo
