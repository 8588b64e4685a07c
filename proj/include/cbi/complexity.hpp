#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbi/cfg.hpp"
#include "cbi/def_use.hpp"

namespace cbi {

// Variables ordered by data-flow complexity: score = N_def + N_use,
// descending, ties broken by earliest declaring line.
struct VariableRanking {
    struct Entry {
        std::string name;
        int score;
        int declaring_line;
    };
    std::vector<Entry> entries;
    int total_variables = 0;
};

// Per-statement control-flow complexity of one function. A statement's
// score is the cyclomatic count accumulated at its nesting position: one
// plus the number of decision statements (if/for/while) enclosing it,
// counting the statement itself when it is a decision. The deepest
// decision statement of a function therefore carries the function's full
// cyclomatic complexity (edges - nodes + 2 of its CFG).
struct StatementComplexityMap {
    struct Entry {
        int stmt_id;  // node id in the Cfg
        LineSpan span;
        int score;
    };
    std::string function;
    std::vector<Entry> entries;
    std::set<int> oracle_lines;  // lines containing printf or abort calls
};

// The slots that fill the mutation prompt pattern.
struct MutationTarget {
    std::vector<std::string> variables;
    int start_line = 0;
    int end_line = 0;
};

VariableRanking rank_variables(const DefUseTable& table);

StatementComplexityMap statement_complexity(const Cfg& cfg, const Ast& ast);

// Comp-1 when three or fewer variables exist, Comp-3 otherwise. `top_k`
// overrides the Comp-3 width; the default follows the evaluated policy.
std::vector<std::string> select_variables(const VariableRanking& ranking, int top_k = 3);

// Highest-scoring statement region whose span avoids every oracle line.
// Ties prefer the earliest start line, then the widest span.
std::pair<int, int> select_location(const StatementComplexityMap& map);
std::pair<int, int> select_location(std::span<const StatementComplexityMap> maps);

// Full pipeline convenience: ranking + per-function maps over the whole
// program, oracle lines pooled program-wide.
MutationTarget select_mutation_target(const Ast& ast, int top_k = 3);

}  // namespace cbi
