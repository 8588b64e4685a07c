#include "cbi/validation.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cbi/ast.hpp"
#include "cbi/errors.hpp"
#include "cbi/parser.hpp"
#include "cbi/process.hpp"

namespace cbi {

namespace {

struct Finding {
    int line;
    int source;  // 0 = built-in, 1 = external analyzer
    int seq;
    UbCategory category;
    std::string note;
};

// --- constant folding (integers only) ---------------------------------------

std::optional<long long> fold(const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::CharLit:
            return e.int_value;
        case ExprKind::Cast:
            return fold(*e.children[0]);
        case ExprKind::Unary: {
            if (e.is_postfix) return std::nullopt;
            auto v = fold(*e.children[0]);
            if (!v) return std::nullopt;
            if (e.op == "-") return -*v;
            if (e.op == "+") return *v;
            if (e.op == "~") return ~*v;
            if (e.op == "!") return *v == 0 ? 1 : 0;
            return std::nullopt;
        }
        case ExprKind::Binary: {
            auto l = fold(*e.children[0]);
            auto r = fold(*e.children[1]);
            if (!l || !r) return std::nullopt;
            const std::string& op = e.op;
            if (op == "+") return *l + *r;
            if (op == "-") return *l - *r;
            if (op == "*") return *l * *r;
            if (op == "/") return *r == 0 ? std::nullopt : std::optional(*l / *r);
            if (op == "%") return *r == 0 ? std::nullopt : std::optional(*l % *r);
            if (op == "<<") return (*r < 0 || *r >= 63) ? std::nullopt : std::optional(*l << *r);
            if (op == ">>") return (*r < 0 || *r >= 63) ? std::nullopt : std::optional(*l >> *r);
            if (op == "&") return *l & *r;
            if (op == "|") return *l | *r;
            if (op == "^") return *l ^ *r;
            if (op == "==") return *l == *r;
            if (op == "!=") return *l != *r;
            if (op == "<") return *l < *r;
            if (op == ">") return *l > *r;
            if (op == "<=") return *l <= *r;
            if (op == ">=") return *l >= *r;
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

// --- program facts -----------------------------------------------------------

struct VarFacts {
    std::vector<std::string> type_tokens;
    bool is_pointer = false;
    bool is_array = false;
    std::optional<long long> array_size;
    bool initialized_at_decl = false;
    bool is_local = false;
};

struct PointerFacts {
    std::set<std::string> addr_sources;  // distinct `&x` targets
    bool has_null_source = false;        // assigned a constant zero
    bool poisoned = false;               // any other assignment form
};

class Checker {
public:
    explicit Checker(const Ast& ast) : ast_(ast) { collect_facts(); }

    std::vector<Finding> run() {
        for (const auto& g : ast_.globals) check_decl(g);
        for (const auto& fn : ast_.functions) {
            reads_before_def_.clear();
            defined_.clear();
            for (const auto& p : fn.params) defined_.insert(p.name);
            visit_stmt(*fn.body);
        }
        std::stable_sort(findings_.begin(), findings_.end(), [](const Finding& a, const Finding& b) {
            if (a.line != b.line) return a.line < b.line;
            if (a.source != b.source) return a.source < b.source;
            return a.seq < b.seq;
        });
        return findings_;
    }

private:
    const Ast& ast_;
    std::map<std::string, VarFacts> vars_;
    std::map<std::string, PointerFacts> pointers_;
    std::set<std::string> defined_;  // per-function: locals seen a def so far
    std::set<std::string> reads_before_def_;
    std::vector<Finding> findings_;
    int seq_ = 0;

    void note_var(const VarDecl& d, bool local) {
        auto [it, inserted] = vars_.try_emplace(d.name);
        if (!inserted) return;
        it->second.type_tokens = d.type_tokens;
        it->second.is_pointer = d.pointer_depth > 0 && !d.is_array;
        it->second.is_array = d.is_array;
        it->second.array_size = d.declared_size();
        it->second.initialized_at_decl = d.has_initializer();
        it->second.is_local = local;
        if (it->second.is_pointer) pointers_.try_emplace(d.name);
    }

    void record_pointer_rhs(const std::string& name, const Expr& rhs) {
        auto it = pointers_.find(name);
        if (it == pointers_.end()) return;
        if (rhs.kind == ExprKind::Unary && rhs.op == "&" &&
            rhs.children[0]->kind == ExprKind::Ident) {
            it->second.addr_sources.insert(rhs.children[0]->name);
            return;
        }
        if (auto v = fold(rhs); v && *v == 0) {
            it->second.has_null_source = true;
            return;
        }
        it->second.poisoned = true;
    }

    void collect_facts() {
        for (const auto& g : ast_.globals) note_var(g, false);
        for (const auto& fn : ast_.functions) {
            for (const auto& p : fn.params) note_var(p, false);
            for_each_stmt(fn, [&](const Stmt& s) {
                if (s.kind == StmtKind::Decl)
                    for (const auto& d : s.decls) note_var(d, true);
            });
        }
        auto scan = [&](const Expr& e) {
            if (e.kind == ExprKind::Assign && e.op == "=" &&
                e.children[0]->kind == ExprKind::Ident)
                record_pointer_rhs(e.children[0]->name, *e.children[1]);
        };
        for (const auto& g : ast_.globals)
            if (g.init) record_pointer_rhs(g.name, *g.init);
        for (const auto& fn : ast_.functions) {
            for_each_stmt(fn, [&](const Stmt& s) {
                if (s.kind == StmtKind::Decl)
                    for (const auto& d : s.decls)
                        if (d.init) record_pointer_rhs(d.name, *d.init);
                for_each_own_expr(s, scan);
            });
        }
    }

    // Pointer that can only ever be null.
    bool is_null_pointer(const std::string& name) const {
        auto it = pointers_.find(name);
        if (it == pointers_.end()) return false;
        const auto& p = it->second;
        return p.has_null_source && !p.poisoned && p.addr_sources.empty();
    }
    // Pointer aimed at exactly one scalar object.
    std::optional<std::string> single_scalar_target(const std::string& name) const {
        auto it = pointers_.find(name);
        if (it == pointers_.end()) return std::nullopt;
        const auto& p = it->second;
        if (p.poisoned || p.has_null_source || p.addr_sources.size() != 1) return std::nullopt;
        const std::string& tgt = *p.addr_sources.begin();
        auto vt = vars_.find(tgt);
        if (vt == vars_.end() || vt->second.is_array) return std::nullopt;
        return tgt;
    }

    void add_finding(int line, UbCategory cat, std::string note) {
        findings_.push_back({line, 0, seq_++, cat, std::move(note)});
    }

    int shift_width(const Expr& lhs) const {
        if (lhs.kind == ExprKind::Ident) {
            auto it = vars_.find(lhs.name);
            if (it != vars_.end())
                for (const auto& t : it->second.type_tokens)
                    if (t == "long") return 64;
        }
        return 32;  // char/short/int promote to int
    }

    void mark_def(const std::string& name) { defined_.insert(name); }

    void mark_use(const std::string& name, int line) {
        auto it = vars_.find(name);
        if (it == vars_.end()) return;
        const VarFacts& f = it->second;
        if (!f.is_local || f.initialized_at_decl) return;
        if (defined_.count(name) || reads_before_def_.count(name)) return;
        reads_before_def_.insert(name);
        add_finding(line, UbCategory::Initialization,
                    "'" + name + "' is read before any assignment");
    }

    void check_deref(const Expr& pointer_expr, int line) {
        // *p, *(p + k), *(p - k)
        const Expr* base = &pointer_expr;
        long long offset = 0;
        if (base->kind == ExprKind::Binary && (base->op == "+" || base->op == "-")) {
            auto k = fold(*base->children[1]);
            if (k && base->children[0]->kind == ExprKind::Ident) {
                offset = base->op == "-" ? -*k : *k;
                base = base->children[0].get();
            }
        }
        if (base->kind != ExprKind::Ident) return;
        if (is_null_pointer(base->name)) {
            add_finding(line, UbCategory::MemAccess,
                        "dereference of null pointer '" + base->name + "'");
            return;
        }
        if (offset != 0)
            if (auto tgt = single_scalar_target(base->name))
                add_finding(line, UbCategory::MemAccess,
                            "access " + std::to_string(offset) + " past scalar '" + *tgt + "'");
    }

    void check_expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Binary: {
                const std::string& op = e.op;
                if (op == "/" || op == "%") {
                    if (auto r = fold(*e.children[1]); r && *r == 0)
                        add_finding(e.line, UbCategory::DivisionByZero,
                                    "right operand of '" + op + "' is zero");
                }
                if (op == "<<" || op == ">>") {
                    if (auto r = fold(*e.children[1])) {
                        int width = shift_width(*e.children[0]);
                        if (*r < 0)
                            add_finding(e.line, UbCategory::Shift,
                                        "shift by negative amount " + std::to_string(*r));
                        else if (*r >= width)
                            add_finding(e.line, UbCategory::Shift,
                                        "shift by " + std::to_string(*r) + " exceeds width " +
                                            std::to_string(width));
                    }
                }
                break;
            }
            case ExprKind::Assign: {
                const std::string& op = e.op;
                if (op == "/=" || op == "%=") {
                    if (auto r = fold(*e.children[1]); r && *r == 0)
                        add_finding(e.line, UbCategory::DivisionByZero,
                                    "right operand of '" + op + "' is zero");
                }
                if (op == "<<=" || op == ">>=") {
                    if (auto r = fold(*e.children[1])) {
                        int width = shift_width(*e.children[0]);
                        if (*r < 0 || *r >= width)
                            add_finding(e.line, UbCategory::Shift,
                                        "shift amount " + std::to_string(*r) + " out of range");
                    }
                }
                break;
            }
            case ExprKind::Index: {
                const Expr& bexpr = *e.children[0];
                if (bexpr.kind == ExprKind::Ident) {
                    auto it = vars_.find(bexpr.name);
                    if (it != vars_.end() && it->second.is_array && it->second.array_size) {
                        if (auto idx = fold(*e.children[1])) {
                            if (*idx < 0 || *idx >= *it->second.array_size)
                                add_finding(e.line, UbCategory::IndexBound,
                                            "index " + std::to_string(*idx) + " outside '" +
                                                bexpr.name + "[" +
                                                std::to_string(*it->second.array_size) + "]'");
                        }
                    } else if (it != vars_.end() && it->second.is_pointer) {
                        if (auto idx = fold(*e.children[1]); idx && *idx != 0) {
                            if (is_null_pointer(bexpr.name))
                                add_finding(e.line, UbCategory::MemAccess,
                                            "index through null pointer '" + bexpr.name + "'");
                            else if (auto tgt = single_scalar_target(bexpr.name))
                                add_finding(e.line, UbCategory::MemAccess,
                                            "access " + std::to_string(*idx) + " past scalar '" +
                                                *tgt + "'");
                        } else if (is_null_pointer(bexpr.name)) {
                            add_finding(e.line, UbCategory::MemAccess,
                                        "index through null pointer '" + bexpr.name + "'");
                        }
                    }
                }
                break;
            }
            case ExprKind::Unary:
                if (e.op == "*" && !e.is_postfix) check_deref(*e.children[0], e.line);
                break;
            default:
                break;
        }
    }

    // Initialization tracking mirrors the def/use rules: reads are uses,
    // assignment targets are defs, compound/inc-dec both.
    void track_expr(const Expr& e, int line) {
        switch (e.kind) {
            case ExprKind::Ident:
                mark_use(e.name, line);
                return;
            case ExprKind::Assign: {
                track_expr(*e.children[1], line);  // RHS evaluates first
                const Expr& lhs = *e.children[0];
                if (lhs.kind == ExprKind::Ident) {
                    if (e.op != "=") mark_use(lhs.name, line);
                    mark_def(lhs.name);
                } else if (lhs.kind == ExprKind::Index) {
                    track_expr(*lhs.children[1], line);
                    if (lhs.children[0]->kind == ExprKind::Ident)
                        mark_def(lhs.children[0]->name);
                } else if (lhs.kind == ExprKind::Unary && lhs.op == "*") {
                    if (lhs.children[0]->kind == ExprKind::Ident) {
                        mark_use(lhs.children[0]->name, line);
                        if (auto tgt = single_scalar_target(lhs.children[0]->name))
                            mark_def(*tgt);
                    } else {
                        track_expr(*lhs.children[0], line);
                    }
                } else {
                    track_expr(lhs, line);
                }
                return;
            }
            case ExprKind::Unary:
                if (e.op == "&" && e.children[0]->kind == ExprKind::Ident) return;
                if ((e.op == "++" || e.op == "--") && e.children[0]->kind == ExprKind::Ident) {
                    mark_use(e.children[0]->name, line);
                    mark_def(e.children[0]->name);
                    return;
                }
                track_expr(*e.children[0], line);
                return;
            default:
                for (const auto& c : e.children) track_expr(*c, line);
                return;
        }
    }

    void scan_and_track(const Expr& e) {
        for_each_subexpr(e, [&](const Expr& sub) { check_expr(sub); });
        track_expr(e, e.line);
    }

    // Statements visited in evaluation order so the initialization check
    // sees defs before the reads that follow them on the fall-through path.
    void visit_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& c : s.stmts) visit_stmt(*c);
                return;
            case StmtKind::Decl:
                for (const auto& d : s.decls) check_decl(d);
                return;
            case StmtKind::For:
                if (s.init) visit_stmt(*s.init);
                if (s.cond) scan_and_track(*s.cond);
                if (s.body) visit_stmt(*s.body);
                if (s.step) scan_and_track(*s.step);
                return;
            case StmtKind::If:
                scan_and_track(*s.expr);
                if (s.body) visit_stmt(*s.body);
                if (s.else_body) visit_stmt(*s.else_body);
                return;
            case StmtKind::While:
                scan_and_track(*s.expr);
                if (s.body) visit_stmt(*s.body);
                return;
            default:
                if (s.expr) scan_and_track(*s.expr);
                return;
        }
    }

    void check_decl(const VarDecl& d) {
        if (d.init) {
            for_each_subexpr(*d.init, [&](const Expr& e) { check_expr(e); });
            track_expr(*d.init, d.line);
        }
        if (d.init_list)
            for (const auto& el : d.init_list->elements) {
                for_each_subexpr(*el, [&](const Expr& e) { check_expr(e); });
                track_expr(*el, d.line);
            }
        if (d.has_initializer()) mark_def(d.name);
    }
};

std::vector<Finding> run_external_analyzer(const std::string& command,
                                           const SourceProgram& candidate) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> invocation{0};
    fs::path dir = fs::temp_directory_path() /
                   ("cbi-analyze-" + std::to_string(getpid()) + "-" +
                    std::to_string(invocation.fetch_add(1)));
    fs::create_directories(dir);
    fs::path file = dir / (candidate.id.empty() ? "candidate.c" : candidate.id + ".c");
    {
        std::ofstream out(file);
        out << candidate.text;
    }
    ProcessResult res = run_command(command + " " + file.string(), 60);
    std::error_code ec;
    fs::remove_all(dir, ec);
    if (res.signaled || res.timed_out || res.exit_code != 0)
        throw AnalyzerFailure("analyzer '" + command + "' exited abnormally: " + res.output);

    std::vector<Finding> findings;
    int seq = 0;
    size_t pos = 0;
    while (pos < res.output.size()) {
        size_t eol = res.output.find('\n', pos);
        std::string line = res.output.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? res.output.size() : eol + 1;
        if (line.empty()) continue;
        size_t c1 = line.find(':');
        size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw AnalyzerFailure("malformed analyzer finding: " + line);
        auto cat = ub_category_from_string(line.substr(0, c1));
        if (!cat) throw AnalyzerFailure("unknown analyzer category in: " + line);
        int lineno = 0;
        try {
            lineno = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        } catch (...) {
            throw AnalyzerFailure("malformed analyzer line number in: " + line);
        }
        findings.push_back({lineno, 1, seq++, *cat, line.substr(c2 + 1)});
    }
    return findings;
}

int count_calls(const Ast& ast, const std::string& callee) {
    int n = 0;
    auto visit = [&](const Expr& e) {
        if (e.kind == ExprKind::Call && e.name == callee) ++n;
    };
    for (const auto& g : ast.globals) {
        if (g.init) for_each_subexpr(*g.init, visit);
        if (g.init_list)
            for (const auto& el : g.init_list->elements) for_each_subexpr(*el, visit);
    }
    for (const auto& fn : ast.functions)
        for_each_stmt(fn, [&](const Stmt& s) { for_each_own_expr(s, visit); });
    return n;
}

}  // namespace

const char* to_string(UbCategory c) {
    switch (c) {
        case UbCategory::MemAccess: return "mem_access";
        case UbCategory::Shift: return "shift";
        case UbCategory::IndexBound: return "index_bound";
        case UbCategory::Initialization: return "initialization";
        case UbCategory::DivisionByZero: return "division_by_zero";
    }
    return "?";
}

const char* display_name(UbCategory c) {
    switch (c) {
        case UbCategory::MemAccess: return "invalid memory access";
        case UbCategory::Shift: return "invalid shift";
        case UbCategory::IndexBound: return "out-of-bound array index";
        case UbCategory::Initialization: return "use of an uninitialized variable";
        case UbCategory::DivisionByZero: return "divided by zero";
    }
    return "?";
}

std::optional<UbCategory> ub_category_from_string(const std::string& s) {
    if (s == "mem_access") return UbCategory::MemAccess;
    if (s == "shift") return UbCategory::Shift;
    if (s == "index_bound") return UbCategory::IndexBound;
    if (s == "initialization") return UbCategory::Initialization;
    if (s == "division_by_zero") return UbCategory::DivisionByZero;
    return std::nullopt;
}

ValidationReport semantic_validate(const SourceProgram& candidate,
                                   const std::string& analyzer_command) {
    Ast ast = parse(candidate);
    std::vector<Finding> findings = Checker(ast).run();
    if (!analyzer_command.empty()) {
        auto external = run_external_analyzer(analyzer_command, candidate);
        findings.insert(findings.end(), std::make_move_iterator(external.begin()),
                        std::make_move_iterator(external.end()));
        std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
            if (a.line != b.line) return a.line < b.line;
            if (a.source != b.source) return a.source < b.source;
            return a.seq < b.seq;
        });
    }
    if (findings.empty()) return ValidationReport::ok();
    const Finding& first = findings.front();
    ValidationReport report;
    report.verdict = Verdict::SemanticInvalid;
    report.cause = first.category;
    report.line = first.line;
    report.note = first.note;
    return report;
}

ValidationReport oracle_validate(const SourceProgram& candidate, const SourceProgram& failing) {
    Ast cand = parse(candidate);
    Ast fail = parse(failing);
    OracleCounts counts;
    counts.expected_printf = count_calls(fail, "printf");
    counts.expected_abort = count_calls(fail, "abort");
    counts.found_printf = count_calls(cand, "printf");
    counts.found_abort = count_calls(cand, "abort");
    if (counts.expected_printf == counts.found_printf &&
        counts.expected_abort == counts.found_abort)
        return ValidationReport::ok();
    ValidationReport report;
    report.verdict = Verdict::OracleInvalid;
    report.oracle = counts;
    report.note = "printf " + std::to_string(counts.found_printf) + "/" +
                  std::to_string(counts.expected_printf) + ", abort " +
                  std::to_string(counts.found_abort) + "/" +
                  std::to_string(counts.expected_abort);
    return report;
}

}  // namespace cbi
