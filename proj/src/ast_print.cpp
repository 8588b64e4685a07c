#include "cbi/ast_print.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace cbi {

namespace {

using nlohmann::json;

// --- pretty printing --------------------------------------------------------

void print_expr(std::ostream& os, const Expr& e, bool parens_for_binary = false);

void print_expr_child(std::ostream& os, const Expr& e) {
    bool need_parens = e.kind == ExprKind::Binary || e.kind == ExprKind::Ternary ||
                       e.kind == ExprKind::Assign;
    if (need_parens) os << "(";
    print_expr(os, e);
    if (need_parens) os << ")";
}

void print_expr(std::ostream& os, const Expr& e, bool) {
    switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::FloatLit:
            os << e.literal;
            break;
        case ExprKind::CharLit:
            os << "'" << e.literal << "'";
            break;
        case ExprKind::StringLit:
            os << '"' << e.literal << '"';
            break;
        case ExprKind::Ident:
            os << e.name;
            break;
        case ExprKind::Unary:
            if (e.is_postfix) {
                print_expr_child(os, *e.children[0]);
                os << e.op;
            } else {
                os << e.op;
                print_expr_child(os, *e.children[0]);
            }
            break;
        case ExprKind::Binary:
            print_expr_child(os, *e.children[0]);
            os << " " << e.op << " ";
            print_expr_child(os, *e.children[1]);
            break;
        case ExprKind::Ternary:
            print_expr_child(os, *e.children[0]);
            os << " ? ";
            print_expr_child(os, *e.children[1]);
            os << " : ";
            print_expr_child(os, *e.children[2]);
            break;
        case ExprKind::Assign:
            print_expr(os, *e.children[0]);
            os << " " << e.op << " ";
            print_expr(os, *e.children[1]);
            break;
        case ExprKind::Call: {
            os << e.name << "(";
            bool first = true;
            for (const auto& a : e.children) {
                if (!first) os << ", ";
                first = false;
                print_expr(os, *a);
            }
            os << ")";
            break;
        }
        case ExprKind::Index:
            print_expr_child(os, *e.children[0]);
            os << "[";
            print_expr(os, *e.children[1]);
            os << "]";
            break;
        case ExprKind::Cast: {
            os << "(";
            bool first = true;
            for (const auto& t : e.type_tokens) {
                if (!first && t != "*") os << " ";
                first = false;
                os << t;
            }
            os << ")";
            print_expr_child(os, *e.children[0]);
            break;
        }
    }
}

std::string expr_str(const Expr& e) {
    std::ostringstream os;
    print_expr(os, e);
    return os.str();
}

void print_decl_group(std::ostream& os, const std::vector<VarDecl>& decls) {
    for (size_t i = 0; i < decls.size(); ++i) {
        const VarDecl& d = decls[i];
        if (i == 0) {
            for (const auto& t : d.type_tokens) os << t << " ";
        } else {
            os << ", ";
        }
        for (int p = 0; p < d.pointer_depth; ++p) os << "*";
        os << d.name;
        if (d.is_array) {
            os << "[";
            if (d.array_size) os << *d.array_size;
            os << "]";
        }
        if (d.init) os << " = " << expr_str(*d.init);
        if (d.init_list) {
            os << " = {";
            for (size_t j = 0; j < d.init_list->elements.size(); ++j) {
                if (j) os << ", ";
                os << expr_str(*d.init_list->elements[j]);
            }
            os << "}";
        }
    }
    os << ";";
}

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    switch (s.kind) {
        case StmtKind::Decl:
            os << pad;
            print_decl_group(os, s.decls);
            os << "\n";
            break;
        case StmtKind::Assign:
        case StmtKind::Call:
        case StmtKind::Expr:
            os << pad << expr_str(*s.expr) << ";\n";
            break;
        case StmtKind::Empty:
            os << pad << ";\n";
            break;
        case StmtKind::If:
            os << pad << "if (" << expr_str(*s.expr) << ")\n";
            print_stmt(os, *s.body, indent + 1);
            if (s.else_body) {
                os << pad << "else\n";
                print_stmt(os, *s.else_body, indent + 1);
            }
            break;
        case StmtKind::For: {
            os << pad << "for (";
            if (s.init) {
                if (s.init->kind == StmtKind::Decl) {
                    print_decl_group(os, s.init->decls);
                } else {
                    os << expr_str(*s.init->expr) << ";";
                }
            } else {
                os << ";";
            }
            os << " ";
            if (s.cond) os << expr_str(*s.cond);
            os << "; ";
            if (s.step) os << expr_str(*s.step);
            os << ")\n";
            print_stmt(os, *s.body, indent + 1);
            break;
        }
        case StmtKind::While:
            os << pad << "while (" << expr_str(*s.expr) << ")\n";
            print_stmt(os, *s.body, indent + 1);
            break;
        case StmtKind::Goto:
            os << pad << "goto " << s.label << ";\n";
            break;
        case StmtKind::Label:
            os << s.label << ":\n";
            break;
        case StmtKind::Break:
            os << pad << "break;\n";
            break;
        case StmtKind::Continue:
            os << pad << "continue;\n";
            break;
        case StmtKind::Return:
            os << pad << "return";
            if (s.expr) os << " " << expr_str(*s.expr);
            os << ";\n";
            break;
        case StmtKind::Block:
            os << pad << "{\n";
            for (const auto& c : s.stmts) print_stmt(os, *c, indent + 1);
            os << pad << "}\n";
            break;
    }
}

// --- structural signature ----------------------------------------------------

void sig_expr(std::ostream& os, const Expr& e) {
    os << "(" << to_string(e.kind);
    if (!e.op.empty()) os << " " << e.op << (e.is_postfix ? "@post" : "");
    if (!e.name.empty()) os << " " << e.name;
    if (e.kind == ExprKind::IntLit || e.kind == ExprKind::CharLit) os << " " << e.int_value;
    if (e.kind == ExprKind::FloatLit || e.kind == ExprKind::StringLit) os << " " << e.literal;
    for (const auto& t : e.type_tokens) os << " " << t;
    for (const auto& c : e.children) sig_expr(os, *c);
    os << ")";
}

void sig_decl(std::ostream& os, const VarDecl& d) {
    os << "(decl " << d.name;
    for (const auto& t : d.type_tokens) os << " " << t;
    os << " ptr" << d.pointer_depth;
    if (d.is_array) {
        os << " arr";
        if (d.array_size) os << *d.array_size;
    }
    if (d.init) sig_expr(os, *d.init);
    if (d.init_list) {
        os << " {";
        for (const auto& el : d.init_list->elements) sig_expr(os, *el);
        os << "}";
    }
    os << ")";
}

void sig_stmt(std::ostream& os, const Stmt& s) {
    os << "(" << to_string(s.kind);
    if (!s.label.empty()) os << " " << s.label;
    for (const auto& d : s.decls) sig_decl(os, d);
    if (s.expr) sig_expr(os, *s.expr);
    if (s.init) sig_stmt(os, *s.init);
    if (s.cond) sig_expr(os, *s.cond);
    if (s.step) sig_expr(os, *s.step);
    if (s.body) sig_stmt(os, *s.body);
    if (s.else_body) sig_stmt(os, *s.else_body);
    for (const auto& c : s.stmts) sig_stmt(os, *c);
    os << ")";
}

// --- JSON dump ----------------------------------------------------------------

json expr_json(const Expr& e) {
    json j;
    j["kind"] = to_string(e.kind);
    j["line"] = e.line;
    if (!e.op.empty()) j["op"] = e.op;
    if (!e.name.empty()) j["name"] = e.name;
    if (e.kind == ExprKind::IntLit || e.kind == ExprKind::CharLit) j["value"] = e.int_value;
    if (e.kind == ExprKind::FloatLit || e.kind == ExprKind::StringLit) j["literal"] = e.literal;
    if (e.is_postfix) j["postfix"] = true;
    if (!e.children.empty()) {
        json kids = json::array();
        for (const auto& c : e.children) kids.push_back(expr_json(*c));
        j["children"] = std::move(kids);
    }
    return j;
}

json stmt_json(const Stmt& s) {
    json j;
    // break/continue surface as unconditional jumps in the dump.
    StmtKind k = s.kind;
    if (k == StmtKind::Break || k == StmtKind::Continue) {
        j["kind"] = "goto";
        j["detail"] = to_string(k);
    } else if (k == StmtKind::Empty) {
        j["kind"] = "expr";
        j["detail"] = "empty";
    } else {
        j["kind"] = to_string(k);
    }
    j["span"] = {s.span.start, s.span.end};
    if (!s.label.empty()) j["label"] = s.label;
    if (!s.decls.empty()) {
        json ds = json::array();
        for (const auto& d : s.decls) {
            json dj;
            dj["name"] = d.name;
            dj["type"] = d.type_tokens;
            dj["pointer_depth"] = d.pointer_depth;
            dj["initialized"] = d.has_initializer();
            if (d.is_array) dj["array"] = d.declared_size() ? json(*d.declared_size()) : json(nullptr);
            ds.push_back(std::move(dj));
        }
        j["decls"] = std::move(ds);
    }
    if (s.expr) j["expr"] = expr_json(*s.expr);
    if (s.cond) j["cond"] = expr_json(*s.cond);
    if (s.step) j["step"] = expr_json(*s.step);
    json kids = json::array();
    if (s.init) kids.push_back(stmt_json(*s.init));
    if (s.body) kids.push_back(stmt_json(*s.body));
    if (s.else_body) kids.push_back(stmt_json(*s.else_body));
    for (const auto& c : s.stmts) kids.push_back(stmt_json(*c));
    if (!kids.empty()) j["children"] = std::move(kids);
    return j;
}

}  // namespace

std::string pretty_print(const Ast& ast) {
    std::ostringstream os;
    if (!ast.globals.empty()) {
        // Globals print one per line; the original grouping is not preserved.
        for (const auto& g : ast.globals) {
            for (const auto& t : g.type_tokens) os << t << " ";
            for (int p = 0; p < g.pointer_depth; ++p) os << "*";
            os << g.name;
            if (g.is_array) {
                os << "[";
                if (g.array_size) os << *g.array_size;
                os << "]";
            }
            if (g.init) os << " = " << expr_str(*g.init);
            if (g.init_list) {
                os << " = {";
                for (size_t j = 0; j < g.init_list->elements.size(); ++j) {
                    if (j) os << ", ";
                    os << expr_str(*g.init_list->elements[j]);
                }
                os << "}";
            }
            os << ";\n";
        }
    }
    for (const auto& fn : ast.functions) {
        os << "\n";
        for (const auto& t : fn.return_type_tokens) os << t << " ";
        for (int p = 0; p < fn.return_pointer_depth; ++p) os << "*";
        os << fn.name << "(";
        for (size_t i = 0; i < fn.params.size(); ++i) {
            if (i) os << ", ";
            const auto& d = fn.params[i];
            for (size_t t = 0; t < d.type_tokens.size(); ++t)
                os << (t ? " " : "") << d.type_tokens[t];
            os << " ";
            for (int p = 0; p < d.pointer_depth; ++p) os << "*";
            os << d.name;
        }
        os << ")\n";
        print_stmt(os, *fn.body, 0);
    }
    return os.str();
}

std::string structural_signature(const Ast& ast) {
    std::ostringstream os;
    os << "(program";
    for (const auto& g : ast.globals) sig_decl(os, g);
    for (const auto& fn : ast.functions) {
        os << "(fn " << fn.name;
        for (const auto& t : fn.return_type_tokens) os << " " << t;
        for (const auto& p : fn.params) sig_decl(os, p);
        sig_stmt(os, *fn.body);
        os << ")";
    }
    os << ")";
    return os.str();
}

std::string ast_to_json(const Ast& ast) {
    json j;
    j["line_count"] = ast.line_count;
    json globals = json::array();
    for (const auto& g : ast.globals) {
        json gj;
        gj["name"] = g.name;
        gj["type"] = g.type_tokens;
        gj["line"] = g.line;
        gj["pointer_depth"] = g.pointer_depth;
        gj["initialized"] = g.has_initializer();
        if (g.is_array) gj["array"] = g.declared_size() ? json(*g.declared_size()) : json(nullptr);
        globals.push_back(std::move(gj));
    }
    j["globals"] = std::move(globals);
    json fns = json::array();
    for (const auto& fn : ast.functions) {
        json fj;
        fj["name"] = fn.name;
        fj["span"] = {fn.span.start, fn.span.end};
        json params = json::array();
        for (const auto& p : fn.params) params.push_back(p.name);
        fj["params"] = std::move(params);
        fj["body"] = stmt_json(*fn.body);
        fns.push_back(std::move(fj));
    }
    j["functions"] = std::move(fns);
    return j.dump(2);
}

}  // namespace cbi
