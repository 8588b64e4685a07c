#pragma once

#include "cbi/ast.hpp"
#include "cbi/source_program.hpp"

namespace cbi {

// Parses a C-subset program: scalar/array declarations with qualifiers and
// modifiers, pointers, assignments, unary/binary/ternary expressions,
// if/else, for, while, goto/label, break/continue, function definitions,
// calls, and return. Structs, unions, typedefs, switch, and do-while are
// rejected with a SyntaxError naming the offending token.
Ast parse(const SourceProgram& program);

// Convenience for tests and tools.
Ast parse_text(const std::string& text);

}  // namespace cbi
