#pragma once

#include <map>
#include <string>

#include "cbi/ast.hpp"

namespace cbi {

struct DefUseCounts {
    int n_def = 0;
    int n_use = 0;
    int declaring_line = 0;
};

// Whole-program def/use occurrence counts, aggregated per variable name.
// A def is a declaration-with-initializer, an assignment target, a
// compound-assignment target, an increment/decrement target, or a write
// through a pointer whose sole address-of source is that variable (the
// write defs the pointer itself otherwise). A use is any read of the
// variable's value, including conditions, indices, and call arguments;
// compound assignment and increment/decrement read their target.
// Taking a variable's address is not a use.
struct DefUseTable {
    std::map<std::string, DefUseCounts> vars;

    bool contains(const std::string& name) const { return vars.count(name) > 0; }
    const DefUseCounts& at(const std::string& name) const { return vars.at(name); }
};

DefUseTable def_use(const Ast& ast);

}  // namespace cbi
