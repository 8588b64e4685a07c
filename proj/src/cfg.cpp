#include "cbi/cfg.hpp"

#include <map>
#include <set>

#include "cbi/errors.hpp"

namespace cbi {

namespace {

// Dangling outgoing edge to be wired to the next statement in sequence.
struct Pending {
    int from;
    EdgeKind kind;
};

class Builder {
public:
    explicit Builder(const std::string& name) { cfg_.function = name; }

    Cfg build(const Stmt& body) {
        std::vector<Pending> tail = emit_seq(body, {});
        // Whatever still dangles at the end of the function is an exit.
        for (const auto& p : tail) exits_.insert(p.from);
        for (int r : returns_) exits_.insert(r);
        cfg_.exits.assign(exits_.begin(), exits_.end());
        patch_gotos();
        return std::move(cfg_);
    }

private:
    Cfg cfg_;
    std::set<int> exits_;
    std::vector<int> returns_;
    std::map<std::string, int> labels_;
    std::vector<std::pair<int, std::string>> goto_nodes_;
    // Per enclosing loop: header node and pending break edges.
    struct LoopCtx {
        int header;
        std::vector<Pending>* breaks;
    };
    std::vector<LoopCtx> loop_stack_;

    int add_node(const Stmt& s) {
        cfg_.stmts.push_back(&s);
        int id = static_cast<int>(cfg_.stmts.size()) - 1;
        if (cfg_.entry < 0) cfg_.entry = id;
        return id;
    }

    void connect(const std::vector<Pending>& from, int to) {
        for (const auto& p : from) cfg_.edges.push_back({p.from, to, p.kind});
    }

    // Emits one statement; `incoming` edges attach to its first node.
    // Returns the dangling edges that should flow to whatever follows.
    std::vector<Pending> emit(const Stmt& s, std::vector<Pending> incoming) {
        switch (s.kind) {
            case StmtKind::Block:
                return emit_seq(s, std::move(incoming));
            case StmtKind::If: {
                int node = add_node(s);
                connect(incoming, node);
                std::vector<Pending> out = emit(*s.body, {{node, EdgeKind::BranchTrue}});
                if (s.else_body) {
                    auto else_out = emit(*s.else_body, {{node, EdgeKind::BranchFalse}});
                    out.insert(out.end(), else_out.begin(), else_out.end());
                } else {
                    out.push_back({node, EdgeKind::BranchFalse});
                }
                return out;
            }
            case StmtKind::For:
            case StmtKind::While: {
                int node = add_node(s);
                connect(incoming, node);
                std::vector<Pending> breaks;
                loop_stack_.push_back({node, &breaks});
                std::vector<Pending> body_out = emit(*s.body, {{node, EdgeKind::BranchTrue}});
                loop_stack_.pop_back();
                for (auto& p : body_out) cfg_.edges.push_back({p.from, node, EdgeKind::Back});
                std::vector<Pending> out = std::move(breaks);
                out.push_back({node, EdgeKind::BranchFalse});
                return out;
            }
            case StmtKind::Goto: {
                int node = add_node(s);
                connect(incoming, node);
                goto_nodes_.emplace_back(node, s.label);
                return {};
            }
            case StmtKind::Break: {
                int node = add_node(s);
                connect(incoming, node);
                if (!loop_stack_.empty())
                    loop_stack_.back().breaks->push_back({node, EdgeKind::Fallthrough});
                else
                    exits_.insert(node);
                return {};
            }
            case StmtKind::Continue: {
                int node = add_node(s);
                connect(incoming, node);
                if (!loop_stack_.empty())
                    cfg_.edges.push_back({node, loop_stack_.back().header, EdgeKind::Back});
                else
                    exits_.insert(node);
                return {};
            }
            case StmtKind::Return: {
                int node = add_node(s);
                connect(incoming, node);
                returns_.push_back(node);
                return {};
            }
            case StmtKind::Label: {
                int node = add_node(s);
                connect(incoming, node);
                labels_[s.label] = node;
                return {{node, EdgeKind::Fallthrough}};
            }
            default: {
                int node = add_node(s);
                connect(incoming, node);
                return {{node, EdgeKind::Fallthrough}};
            }
        }
    }

    std::vector<Pending> emit_seq(const Stmt& block, std::vector<Pending> incoming) {
        std::vector<Pending> cur = std::move(incoming);
        for (const auto& child : block.stmts) cur = emit(*child, std::move(cur));
        return cur;
    }

    void patch_gotos() {
        for (const auto& [node, label] : goto_nodes_) {
            auto it = labels_.find(label);
            if (it == labels_.end())
                throw Error("goto target '" + label + "' missing from CFG");
            cfg_.edges.push_back({node, it->second, EdgeKind::Goto});
        }
    }
};

}  // namespace

Cfg build_cfg(const Ast& ast, const std::string& function) {
    const Function* fn = ast.find_function(function);
    if (!fn) throw UnknownFunction(function);
    Builder b(function);
    return b.build(*fn->body);
}

std::vector<std::string> Cfg::validate() const {
    std::vector<std::string> issues;
    const int n = static_cast<int>(stmts.size());
    for (const auto& e : edges)
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            issues.push_back("edge endpoint out of range");
    if (n > 0 && (entry < 0 || entry >= n)) issues.push_back("entry node invalid");
    if (n > 0 && entry >= 0) {
        std::vector<char> seen(static_cast<size_t>(n), 0);
        std::vector<int> work{entry};
        seen[static_cast<size_t>(entry)] = 1;
        while (!work.empty()) {
            int cur = work.back();
            work.pop_back();
            for (const auto& e : edges)
                if (e.from == cur && !seen[static_cast<size_t>(e.to)]) {
                    seen[static_cast<size_t>(e.to)] = 1;
                    work.push_back(e.to);
                }
        }
        for (int i = 0; i < n; ++i)
            if (!seen[static_cast<size_t>(i)])
                issues.push_back("node " + std::to_string(i) + " (line " +
                                 std::to_string(stmts[static_cast<size_t>(i)]->span.start) +
                                 ") unreachable from entry");
    }
    return issues;
}

}  // namespace cbi
