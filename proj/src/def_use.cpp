#include "cbi/def_use.hpp"

#include <optional>
#include <set>

namespace cbi {

namespace {

struct PointerInfo {
    std::set<std::string> sources;  // distinct `&x` initializer/assignment sources
    bool poisoned = false;          // assigned something other than a plain `&x`
};

class Analyzer {
public:
    explicit Analyzer(const Ast& ast) : ast_(ast) {}

    DefUseTable run() {
        collect_decls();
        collect_pointer_sources();
        for (const auto& g : ast_.globals) walk_decl(g);
        for (const auto& fn : ast_.functions)
            for_each_stmt(fn, [&](const Stmt& s) { walk_stmt(s); });
        return std::move(table_);
    }

private:
    const Ast& ast_;
    DefUseTable table_;
    std::map<std::string, PointerInfo> pointers_;
    std::map<std::string, bool> is_array_;

    void declare(const VarDecl& d) {
        auto [it, inserted] = table_.vars.try_emplace(d.name, DefUseCounts{0, 0, d.line});
        (void)it;
        if (!inserted) return;  // same name elsewhere: first declaration wins
        if (d.pointer_depth == 1 && !d.is_array) pointers_.try_emplace(d.name);
        is_array_[d.name] = d.is_array;
    }

    void collect_decls() {
        for (const auto& g : ast_.globals) declare(g);
        for (const auto& fn : ast_.functions) {
            for (const auto& p : fn.params) declare(p);
            for_each_stmt(fn, [&](const Stmt& s) {
                if (s.kind == StmtKind::Decl)
                    for (const auto& d : s.decls) declare(d);
            });
        }
    }

    static const Expr* strip_addr_of(const Expr& e) {
        if (e.kind == ExprKind::Unary && e.op == "&" && !e.is_postfix &&
            e.children[0]->kind == ExprKind::Ident)
            return e.children[0].get();
        return nullptr;
    }

    void record_pointer_source(const std::string& ptr, const Expr& rhs) {
        auto it = pointers_.find(ptr);
        if (it == pointers_.end()) return;
        if (const Expr* target = strip_addr_of(rhs))
            it->second.sources.insert(target->name);
        else
            it->second.poisoned = true;
    }

    void collect_pointer_sources() {
        auto scan_decl = [&](const VarDecl& d) {
            if (d.init) record_pointer_source(d.name, *d.init);
        };
        auto scan_expr = [&](const Expr& e) {
            if (e.kind == ExprKind::Assign && e.children[0]->kind == ExprKind::Ident)
                if (pointers_.count(e.children[0]->name))
                    record_pointer_source(e.children[0]->name, *e.children[1]);
        };
        for (const auto& g : ast_.globals) scan_decl(g);
        for (const auto& fn : ast_.functions) {
            for_each_stmt(fn, [&](const Stmt& s) {
                if (s.kind == StmtKind::Decl)
                    for (const auto& d : s.decls) scan_decl(d);
                for_each_own_expr(s, scan_expr);
            });
        }
    }

    // Single &x source and never reassigned otherwise.
    std::optional<std::string> pointee_of(const std::string& ptr) const {
        auto it = pointers_.find(ptr);
        if (it == pointers_.end()) return std::nullopt;
        if (it->second.poisoned || it->second.sources.size() != 1) return std::nullopt;
        return *it->second.sources.begin();
    }

    void add_def(const std::string& name) {
        auto it = table_.vars.find(name);
        if (it != table_.vars.end()) ++it->second.n_def;
    }
    void add_use(const std::string& name) {
        auto it = table_.vars.find(name);
        if (it != table_.vars.end()) ++it->second.n_use;
    }

    // Records the def implied by writing to lvalue `e`, plus any reads the
    // lvalue computation performs. `also_reads` marks compound/inc-dec
    // writes, which read the old value.
    void walk_write_target(const Expr& e, bool also_reads) {
        switch (e.kind) {
            case ExprKind::Ident:
                add_def(e.name);
                if (also_reads) add_use(e.name);
                return;
            case ExprKind::Index: {
                const Expr& base = *e.children[0];
                walk_read(*e.children[1]);
                if (base.kind == ExprKind::Ident) {
                    auto arr = is_array_.find(base.name);
                    bool pointer_base = arr != is_array_.end() && !arr->second &&
                                        pointers_.count(base.name);
                    if (pointer_base) {
                        add_use(base.name);
                        if (auto tgt = pointee_of(base.name)) {
                            add_def(*tgt);
                            if (also_reads) add_use(*tgt);
                        } else {
                            add_def(base.name);
                        }
                    } else {
                        add_def(base.name);
                        if (also_reads) add_use(base.name);
                    }
                } else {
                    walk_read(base);
                }
                return;
            }
            case ExprKind::Unary:
                if (e.op == "*" && !e.is_postfix) {
                    const Expr& target = *e.children[0];
                    if (target.kind == ExprKind::Ident) {
                        add_use(target.name);  // the pointer value is read
                        if (auto tgt = pointee_of(target.name)) {
                            add_def(*tgt);
                            if (also_reads) add_use(*tgt);
                        } else {
                            add_def(target.name);
                        }
                        return;
                    }
                }
                walk_read(e);
                return;
            default:
                walk_read(e);
                return;
        }
    }

    void walk_read(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident:
                add_use(e.name);
                return;
            case ExprKind::Assign:
                walk_write_target(*e.children[0], e.op != "=");
                walk_read(*e.children[1]);
                return;
            case ExprKind::Unary:
                if (e.op == "&" && !e.is_postfix) {
                    // Address-of reads no value. `&u[i]` still reads the index.
                    const Expr& inner = *e.children[0];
                    if (inner.kind == ExprKind::Ident) return;
                    if (inner.kind == ExprKind::Index) {
                        walk_read(*inner.children[1]);
                        return;
                    }
                    walk_read(inner);
                    return;
                }
                if (e.op == "++" || e.op == "--") {
                    walk_write_target(*e.children[0], /*also_reads=*/true);
                    return;
                }
                if (e.op == "*") {
                    const Expr& inner = *e.children[0];
                    if (inner.kind == ExprKind::Ident) {
                        add_use(inner.name);
                        if (auto tgt = pointee_of(inner.name)) add_use(*tgt);
                        return;
                    }
                }
                walk_read(*e.children[0]);
                return;
            case ExprKind::Call:
                for (const auto& a : e.children) walk_read(*a);
                return;
            default:
                for (const auto& c : e.children) walk_read(*c);
                return;
        }
    }

    void walk_decl(const VarDecl& d) {
        if (d.has_initializer()) add_def(d.name);
        if (d.init) walk_read(*d.init);
        if (d.init_list)
            for (const auto& el : d.init_list->elements) walk_read(*el);
    }

    void walk_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Decl:
                for (const auto& d : s.decls) walk_decl(d);
                return;
            case StmtKind::Assign:
            case StmtKind::Call:
            case StmtKind::Expr:
                walk_read(*s.expr);
                return;
            case StmtKind::If:
            case StmtKind::While:
                walk_read(*s.expr);  // bodies are visited as separate statements
                return;
            case StmtKind::For:
                // init is its own statement in the walk
                if (s.cond) walk_read(*s.cond);
                if (s.step) walk_read(*s.step);
                return;
            case StmtKind::Return:
                if (s.expr) walk_read(*s.expr);
                return;
            default:
                return;
        }
    }
};

}  // namespace

DefUseTable def_use(const Ast& ast) {
    return Analyzer(ast).run();
}

}  // namespace cbi
