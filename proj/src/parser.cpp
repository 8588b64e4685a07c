#include "cbi/parser.hpp"

#include <set>
#include <unordered_set>

#include "cbi/errors.hpp"
#include "cbi/lexer.hpp"

namespace cbi {

namespace {

const std::unordered_set<std::string> kTypeTokens = {
    "void", "int", "char", "float", "double", "long", "short",
    "signed", "unsigned", "const", "volatile", "restrict",
    "static", "extern", "register", "_Bool",
};

const std::unordered_set<std::string> kRejectedKeywords = {
    "struct", "union", "typedef", "switch", "do", "enum", "case", "default", "sizeof",
};

bool is_assign_op(const std::string& s) {
    return s == "=" || s == "+=" || s == "-=" || s == "*=" || s == "/=" || s == "%=" ||
           s == "<<=" || s == ">>=" || s == "&=" || s == "|=" || s == "^=";
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Ast parse_program(int line_count) {
        Ast ast;
        ast.line_count = line_count;
        while (!at_eof()) {
            reject_unsupported(peek());
            if (!is_type_start(peek()))
                throw SyntaxError(peek().line, "expected a declaration, got '" + peek().text + "'");
            parse_top_level(ast);
        }
        return ast;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek(size_t off = 0) const {
        size_t i = pos_ + off;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_eof() const { return peek().kind == TokKind::Eof; }

    bool check_punct(const std::string& p, size_t off = 0) const {
        return peek(off).kind == TokKind::Punct && peek(off).text == p;
    }
    bool check_ident(const std::string& s, size_t off = 0) const {
        return peek(off).kind == TokKind::Identifier && peek(off).text == s;
    }
    bool accept_punct(const std::string& p) {
        if (!check_punct(p)) return false;
        advance();
        return true;
    }
    void expect_punct(const std::string& p, const std::string& where) {
        if (!accept_punct(p))
            throw SyntaxError(peek().line, "expected '" + p + "' " + where + ", got '" + peek().text + "'");
    }

    void reject_unsupported(const Token& t) const {
        if (t.kind == TokKind::Identifier && kRejectedKeywords.count(t.text))
            throw SyntaxError(t.line, "unsupported construct '" + t.text + "'");
    }

    bool is_type_start(const Token& t) const {
        return t.kind == TokKind::Identifier && kTypeTokens.count(t.text) > 0;
    }

    std::vector<std::string> parse_type_tokens() {
        std::vector<std::string> tokens;
        while (is_type_start(peek())) tokens.push_back(advance().text);
        if (tokens.empty())
            throw SyntaxError(peek().line, "expected type, got '" + peek().text + "'");
        return tokens;
    }

    // --- declarations -----------------------------------------------------

    VarDecl parse_declarator(const std::vector<std::string>& type_tokens) {
        VarDecl d;
        d.type_tokens = type_tokens;
        while (accept_punct("*")) ++d.pointer_depth;
        if (peek().kind != TokKind::Identifier)
            throw SyntaxError(peek().line, "expected declarator name, got '" + peek().text + "'");
        reject_unsupported(peek());
        d.line = peek().line;
        d.name = advance().text;
        if (accept_punct("[")) {
            d.is_array = true;
            if (!check_punct("]")) {
                ExprPtr size = parse_expression();
                if (size->kind != ExprKind::IntLit)
                    throw SyntaxError(d.line, "array size must be an integer literal");
                d.array_size = size->int_value;
            }
            expect_punct("]", "after array size");
            if (check_punct("[")) throw SyntaxError(peek().line, "multi-dimensional arrays are unsupported");
        }
        if (accept_punct("=")) {
            if (check_punct("{")) {
                int line = peek().line;
                advance();
                InitList list;
                if (!check_punct("}")) {
                    list.elements.push_back(parse_assignment());
                    while (accept_punct(",")) {
                        if (check_punct("}")) break;  // trailing comma
                        list.elements.push_back(parse_assignment());
                    }
                }
                if (!accept_punct("}")) throw SyntaxError(line, "unterminated initializer list");
                d.init_list = std::move(list);
            } else {
                d.init = parse_assignment();
            }
        }
        return d;
    }

    StmtPtr parse_decl_statement() {
        auto stmt = std::make_unique<Stmt>();
        stmt->kind = StmtKind::Decl;
        stmt->span.start = peek().line;
        auto type_tokens = parse_type_tokens();
        stmt->decls.push_back(parse_declarator(type_tokens));
        while (accept_punct(",")) stmt->decls.push_back(parse_declarator(type_tokens));
        stmt->span.end = peek().line;
        expect_punct(";", "after declaration");
        return stmt;
    }

    void parse_top_level(Ast& ast) {
        size_t save = pos_;
        auto type_tokens = parse_type_tokens();
        int pointer_depth = 0;
        while (accept_punct("*")) ++pointer_depth;
        if (peek().kind != TokKind::Identifier)
            throw SyntaxError(peek().line, "expected declarator name, got '" + peek().text + "'");
        reject_unsupported(peek());
        std::string name = peek().text;
        if (check_punct("(", 1)) {
            advance();  // name
            ast.functions.push_back(parse_function(std::move(type_tokens), pointer_depth, name));
            return;
        }
        pos_ = save;
        StmtPtr decl = parse_decl_statement();
        for (auto& d : decl->decls) ast.globals.push_back(std::move(d));
    }

    Function parse_function(std::vector<std::string> ret_tokens, int ret_ptr, std::string name) {
        Function fn;
        fn.name = std::move(name);
        fn.return_type_tokens = std::move(ret_tokens);
        fn.return_pointer_depth = ret_ptr;
        fn.span.start = peek().line;
        expect_punct("(", "after function name");
        if (!check_punct(")")) {
            if (check_ident("void") && check_punct(")", 1)) {
                advance();
            } else {
                fn.params.push_back(parse_declarator(parse_type_tokens()));
                while (accept_punct(",")) fn.params.push_back(parse_declarator(parse_type_tokens()));
            }
        }
        expect_punct(")", "after parameter list");
        if (!check_punct("{"))
            throw SyntaxError(peek().line, "expected function body, got '" + peek().text + "'");
        fn.body = parse_block();
        fn.span.end = fn.body->span.end;
        return fn;
    }

    // --- statements -------------------------------------------------------

    StmtPtr parse_block() {
        auto block = std::make_unique<Stmt>();
        block->kind = StmtKind::Block;
        block->span.start = peek().line;
        expect_punct("{", "at block start");
        while (!check_punct("}")) {
            if (at_eof()) throw SyntaxError(peek().line, "unterminated block");
            block->stmts.push_back(parse_statement());
        }
        block->span.end = peek().line;
        advance();  // '}'
        return block;
    }

    StmtPtr parse_statement() {
        const Token& t = peek();
        reject_unsupported(t);
        if (t.kind == TokKind::Punct && t.text == "{") return parse_block();
        if (t.kind == TokKind::Punct && t.text == ";") {
            auto s = make_stmt(StmtKind::Empty, t.line);
            advance();
            s->span.end = t.line;
            return s;
        }
        if (is_type_start(t)) return parse_decl_statement();
        if (t.kind == TokKind::Identifier) {
            if (t.text == "if") return parse_if();
            if (t.text == "for") return parse_for();
            if (t.text == "while") return parse_while();
            if (t.text == "goto") return parse_goto();
            if (t.text == "return") return parse_return();
            if (t.text == "break" || t.text == "continue") {
                auto s = make_stmt(t.text == "break" ? StmtKind::Break : StmtKind::Continue, t.line);
                advance();
                s->span.end = peek().line;
                expect_punct(";", "after jump statement");
                return s;
            }
            if (check_punct(":", 1)) {
                auto s = make_stmt(StmtKind::Label, t.line);
                s->label = t.text;
                advance();
                advance();
                s->span.end = t.line;
                return s;
            }
        }
        return parse_expr_statement();
    }

    StmtPtr make_stmt(StmtKind k, int line) {
        auto s = std::make_unique<Stmt>();
        s->kind = k;
        s->span = {line, line};
        return s;
    }

    StmtPtr parse_if() {
        auto s = make_stmt(StmtKind::If, peek().line);
        advance();
        expect_punct("(", "after 'if'");
        s->expr = parse_expression();
        expect_punct(")", "after if condition");
        s->body = parse_statement();
        s->span.end = s->body->span.end;
        if (check_ident("else")) {
            advance();
            s->else_body = parse_statement();
            s->span.end = s->else_body->span.end;
        }
        return s;
    }

    StmtPtr parse_for() {
        auto s = make_stmt(StmtKind::For, peek().line);
        advance();
        expect_punct("(", "after 'for'");
        if (!check_punct(";")) {
            if (is_type_start(peek())) {
                s->init = parse_decl_statement();  // consumes ';'
            } else {
                s->init = parse_expr_statement();  // consumes ';'
            }
        } else {
            advance();
        }
        if (!check_punct(";")) s->cond = parse_expression();
        expect_punct(";", "after for condition");
        if (!check_punct(")")) s->step = parse_expression();
        expect_punct(")", "after for clauses");
        s->body = parse_statement();
        s->span.end = s->body->span.end;
        return s;
    }

    StmtPtr parse_while() {
        auto s = make_stmt(StmtKind::While, peek().line);
        advance();
        expect_punct("(", "after 'while'");
        s->expr = parse_expression();
        expect_punct(")", "after while condition");
        s->body = parse_statement();
        s->span.end = s->body->span.end;
        return s;
    }

    StmtPtr parse_goto() {
        auto s = make_stmt(StmtKind::Goto, peek().line);
        advance();
        if (peek().kind != TokKind::Identifier)
            throw SyntaxError(peek().line, "expected label after 'goto'");
        s->label = advance().text;
        s->span.end = peek().line;
        expect_punct(";", "after goto");
        return s;
    }

    StmtPtr parse_return() {
        auto s = make_stmt(StmtKind::Return, peek().line);
        advance();
        if (!check_punct(";")) s->expr = parse_expression();
        s->span.end = peek().line;
        expect_punct(";", "after return");
        return s;
    }

    StmtPtr parse_expr_statement() {
        int line = peek().line;
        ExprPtr e = parse_expression();
        StmtKind kind = StmtKind::Expr;
        if (e->kind == ExprKind::Assign ||
            (e->kind == ExprKind::Unary && (e->op == "++" || e->op == "--")))
            kind = StmtKind::Assign;
        else if (e->kind == ExprKind::Call)
            kind = StmtKind::Call;
        auto s = make_stmt(kind, line);
        s->expr = std::move(e);
        s->span.end = peek().line;
        expect_punct(";", "after expression");
        return s;
    }

    // --- expressions (precedence climbing) ---------------------------------

    ExprPtr parse_expression() { return parse_assignment(); }

    ExprPtr parse_assignment() {
        ExprPtr lhs = parse_ternary();
        if (peek().kind == TokKind::Punct && is_assign_op(peek().text)) {
            if (lhs->kind != ExprKind::Ident && lhs->kind != ExprKind::Index &&
                !(lhs->kind == ExprKind::Unary && lhs->op == "*"))
                throw SyntaxError(peek().line, "invalid assignment target");
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Assign;
            e->op = advance().text;
            e->line = lhs->line;
            e->children.push_back(std::move(lhs));
            e->children.push_back(parse_assignment());
            return e;
        }
        return lhs;
    }

    ExprPtr parse_ternary() {
        ExprPtr cond = parse_binary(0);
        if (!check_punct("?")) return cond;
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Ternary;
        e->line = advance().line;
        e->children.push_back(std::move(cond));
        e->children.push_back(parse_assignment());
        expect_punct(":", "in conditional expression");
        e->children.push_back(parse_assignment());
        return e;
    }

    static int binary_prec(const std::string& op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "|") return 3;
        if (op == "^") return 4;
        if (op == "&") return 5;
        if (op == "==" || op == "!=") return 6;
        if (op == "<" || op == ">" || op == "<=" || op == ">=") return 7;
        if (op == "<<" || op == ">>") return 8;
        if (op == "+" || op == "-") return 9;
        if (op == "*" || op == "/" || op == "%") return 10;
        return -1;
    }

    ExprPtr parse_binary(int min_prec) {
        ExprPtr lhs = parse_unary();
        while (peek().kind == TokKind::Punct) {
            int prec = binary_prec(peek().text);
            if (prec < 0 || prec < min_prec) break;
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Binary;
            e->op = advance().text;
            e->line = lhs->line;
            e->children.push_back(std::move(lhs));
            e->children.push_back(parse_binary(prec + 1));
            lhs = std::move(e);
        }
        return lhs;
    }

    bool looks_like_cast() const {
        return check_punct("(") && peek(1).kind == TokKind::Identifier && kTypeTokens.count(peek(1).text);
    }

    ExprPtr parse_unary() {
        const Token& t = peek();
        if (t.kind == TokKind::Punct &&
            (t.text == "!" || t.text == "~" || t.text == "-" || t.text == "+" || t.text == "*" ||
             t.text == "&" || t.text == "++" || t.text == "--")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->op = t.text;
            e->line = t.line;
            advance();
            e->children.push_back(parse_unary());
            return e;
        }
        if (looks_like_cast()) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Cast;
            e->line = t.line;
            advance();  // '('
            e->type_tokens = parse_type_tokens();
            while (accept_punct("*")) e->type_tokens.push_back("*");
            expect_punct(")", "after cast type");
            e->children.push_back(parse_unary());
            return e;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (check_punct("(") && e->kind == ExprKind::Ident) {
                auto call = std::make_unique<Expr>();
                call->kind = ExprKind::Call;
                call->name = e->name;
                call->line = e->line;
                advance();
                if (!check_punct(")")) {
                    call->children.push_back(parse_assignment());
                    while (accept_punct(",")) call->children.push_back(parse_assignment());
                }
                expect_punct(")", "after call arguments");
                e = std::move(call);
            } else if (check_punct("[")) {
                auto idx = std::make_unique<Expr>();
                idx->kind = ExprKind::Index;
                idx->line = peek().line;
                advance();
                idx->children.push_back(std::move(e));
                idx->children.push_back(parse_expression());
                expect_punct("]", "after index");
                e = std::move(idx);
            } else if (check_punct("++") || check_punct("--")) {
                auto u = std::make_unique<Expr>();
                u->kind = ExprKind::Unary;
                u->op = advance().text;
                u->is_postfix = true;
                u->line = e->line;
                u->children.push_back(std::move(e));
                e = std::move(u);
            } else if (check_punct(".") || check_punct("->")) {
                throw SyntaxError(peek().line, "unsupported construct '" + peek().text + "'");
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        auto e = std::make_unique<Expr>();
        e->line = t.line;
        switch (t.kind) {
            case TokKind::IntLit:
                e->kind = ExprKind::IntLit;
                e->literal = t.text;
                e->int_value = t.int_value;
                advance();
                return e;
            case TokKind::FloatLit:
                e->kind = ExprKind::FloatLit;
                e->literal = t.text;
                advance();
                return e;
            case TokKind::CharLit:
                e->kind = ExprKind::CharLit;
                e->literal = t.text;
                e->int_value = t.int_value;
                advance();
                return e;
            case TokKind::StringLit:
                e->kind = ExprKind::StringLit;
                e->literal = t.text;
                advance();
                return e;
            case TokKind::Identifier:
                reject_unsupported(t);
                if (kTypeTokens.count(t.text))
                    throw SyntaxError(t.line, "unexpected type name '" + t.text + "' in expression");
                e->kind = ExprKind::Ident;
                e->name = t.text;
                advance();
                return e;
            case TokKind::Punct:
                if (t.text == "(") {
                    advance();
                    ExprPtr inner = parse_expression();
                    expect_punct(")", "after parenthesized expression");
                    return inner;
                }
                [[fallthrough]];
            default:
                throw SyntaxError(t.line, "expected expression, got '" +
                                              (t.kind == TokKind::Eof ? "<eof>" : t.text) + "'");
        }
    }
};

void check_goto_labels(const Ast& ast) {
    for (const auto& fn : ast.functions) {
        std::set<std::string> labels;
        std::vector<std::pair<std::string, int>> gotos;
        for_each_stmt(fn, [&](const Stmt& s) {
            if (s.kind == StmtKind::Label) labels.insert(s.label);
            if (s.kind == StmtKind::Goto) gotos.emplace_back(s.label, s.span.start);
        });
        for (const auto& [label, line] : gotos)
            if (!labels.count(label))
                throw SyntaxError(line, "goto target '" + label + "' does not exist");
    }
}

}  // namespace

Ast parse(const SourceProgram& program) {
    Parser p(tokenize(program.text));
    Ast ast = p.parse_program(program.line_count);
    check_goto_labels(ast);
    return ast;
}

Ast parse_text(const std::string& text) {
    return parse(SourceProgram::from_text("inline", text));
}

// --- shared AST walkers -----------------------------------------------------

void for_each_subexpr(const Expr& e, const std::function<void(const Expr&)>& fn) {
    fn(e);
    for (const auto& c : e.children) for_each_subexpr(*c, fn);
}

// A for statement's init clause is a statement of its own and is visited
// by for_each_stmt, not here.
void for_each_own_expr(const Stmt& s, const std::function<void(const Expr&)>& fn) {
    auto walk = [&](const ExprPtr& e) {
        if (e) for_each_subexpr(*e, fn);
    };
    walk(s.expr);
    walk(s.cond);
    walk(s.step);
    for (const auto& d : s.decls) {
        walk(d.init);
        if (d.init_list)
            for (const auto& el : d.init_list->elements) walk(el);
    }
}

void for_each_stmt(const Stmt& root, const std::function<void(const Stmt&)>& fn) {
    fn(root);
    if (root.init) for_each_stmt(*root.init, fn);
    if (root.body) for_each_stmt(*root.body, fn);
    if (root.else_body) for_each_stmt(*root.else_body, fn);
    for (const auto& c : root.stmts) for_each_stmt(*c, fn);
}

void for_each_stmt(const Function& fn_def, const std::function<void(const Stmt&)>& fn) {
    if (fn_def.body) for_each_stmt(*fn_def.body, fn);
}

const char* to_string(StmtKind k) {
    switch (k) {
        case StmtKind::Decl: return "decl";
        case StmtKind::Assign: return "assign";
        case StmtKind::If: return "if";
        case StmtKind::For: return "for";
        case StmtKind::While: return "while";
        case StmtKind::Goto: return "goto";
        case StmtKind::Label: return "label";
        case StmtKind::Call: return "call";
        case StmtKind::Return: return "return";
        case StmtKind::Expr: return "expr";
        case StmtKind::Block: return "block";
        case StmtKind::Break: return "break";
        case StmtKind::Continue: return "continue";
        case StmtKind::Empty: return "empty";
    }
    return "?";
}

const char* to_string(ExprKind k) {
    switch (k) {
        case ExprKind::IntLit: return "int";
        case ExprKind::FloatLit: return "float";
        case ExprKind::CharLit: return "char";
        case ExprKind::StringLit: return "string";
        case ExprKind::Ident: return "ident";
        case ExprKind::Unary: return "unary";
        case ExprKind::Binary: return "binary";
        case ExprKind::Ternary: return "ternary";
        case ExprKind::Assign: return "assign";
        case ExprKind::Call: return "call";
        case ExprKind::Index: return "index";
        case ExprKind::Cast: return "cast";
    }
    return "?";
}

}  // namespace cbi
