#pragma once

#include <string>

#include "cbi/ast.hpp"

namespace cbi {

// Regenerates compilable source text from an Ast.
std::string pretty_print(const Ast& ast);

// A line-number-free structural fingerprint. Two Asts with the same
// fingerprint are structurally identical (same declarations, statement
// shapes, and expression trees).
std::string structural_signature(const Ast& ast);

// Stable JSON dump of the statement tree (node kind, span, children),
// intended for debugging.
std::string ast_to_json(const Ast& ast);

}  // namespace cbi
