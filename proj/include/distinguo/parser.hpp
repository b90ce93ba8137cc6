#pragma once

#include <string_view>

#include "distinguo/formula.hpp"
#include "distinguo/signature.hpp"

namespace distinguo {

// Parses one formula. Grammar (whitespace between tokens is ignored):
//
//   formula = atom | eq | "~" formula
//           | "(" formula op formula { op formula } ")"      op in { "&", "|" }
//           | ("E" | "A") var "." formula
//           | "E^" nat "(" [ varlist ] ")" "." formula
//   atom    = relname "(" varlist ")"
//   eq      = var "=" var
//   var     = "v" nat          varlist = var { "," var }
//
// Relation names start with an uppercase letter. "E" and "A" double as
// quantifiers when not followed by "(". Chains inside parentheses must repeat
// one operator; n-ary nodes print back to the same chain form.
//
// Throws SyntaxError (with byte offset), UnknownRelation, ArityError, or
// EqualityNotEnabled.
Formula parse(std::string_view text, const Signature& sig);

}  // namespace distinguo
