#pragma once

#include <string>
#include <vector>

#include "cbi/ast.hpp"

namespace cbi {

enum class EdgeKind { Fallthrough, BranchTrue, BranchFalse, Back, Goto };

struct CfgEdge {
    int from = 0;
    int to = 0;
    EdgeKind kind = EdgeKind::Fallthrough;
};

// Statement-level control-flow graph of one function. Nodes are indices
// into `stmts` (pre-order over non-block statements); a for/while node
// stands for its header, with back edges from the body.
struct Cfg {
    std::string function;
    std::vector<const Stmt*> stmts;
    std::vector<CfgEdge> edges;
    int entry = -1;
    std::vector<int> exits;

    size_t node_count() const { return stmts.size(); }
    size_t back_edge_count() const {
        size_t n = 0;
        for (const auto& e : edges)
            if (e.kind == EdgeKind::Back) ++n;
        return n;
    }
    // Structural issues found in the graph (bad endpoints, nodes
    // unreachable from entry). Empty means the invariants hold.
    std::vector<std::string> validate() const;
};

// Builds the CFG of `function`. Throws UnknownFunction if absent.
Cfg build_cfg(const Ast& ast, const std::string& function);

}  // namespace cbi
