#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cbi {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class ExprKind {
    IntLit,
    FloatLit,
    CharLit,
    StringLit,
    Ident,
    Unary,    // op applied to child 0; `is_postfix` set for v++ / v--
    Binary,   // children {lhs, rhs}
    Ternary,  // children {cond, then, else}
    Assign,   // children {lhs, rhs}; op is "=", "+=", "<<=", ...
    Call,     // callee name + argument children
    Index,    // children {base, index}
    Cast,     // child 0; type_tokens holds the target type
};

struct Expr {
    ExprKind kind;
    std::string op;            // Unary/Binary/Assign operator spelling
    std::string name;          // Ident / Call callee
    std::string literal;       // literal spelling as written
    long long int_value = 0;   // IntLit / CharLit value
    bool is_postfix = false;   // postfix ++/--
    std::vector<std::string> type_tokens;  // Cast target
    std::vector<ExprPtr> children;
    int line = 0;
};

struct InitList {
    std::vector<ExprPtr> elements;
};

struct VarDecl {
    std::string name;
    std::vector<std::string> type_tokens;  // qualifiers, modifiers, base type, storage class
    int pointer_depth = 0;
    bool is_array = false;
    std::optional<long long> array_size;  // absent for `[]` (size from initializer)
    ExprPtr init;                         // scalar initializer
    std::optional<InitList> init_list;    // braced initializer
    int line = 0;

    bool has_initializer() const { return init != nullptr || init_list.has_value(); }
    // Declared element count, if statically known.
    std::optional<long long> declared_size() const {
        if (!is_array) return std::nullopt;
        if (array_size) return array_size;
        if (init_list) return static_cast<long long>(init_list->elements.size());
        return std::nullopt;
    }
};

enum class StmtKind { Decl, Assign, If, For, While, Goto, Label, Call, Return, Expr, Block, Break, Continue, Empty };

struct LineSpan {
    int start = 0;
    int end = 0;
    bool contains(int line) const { return start <= line && line <= end; }
    bool intersects(const LineSpan& o) const { return start <= o.end && o.start <= end; }
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    StmtKind kind;
    LineSpan span;
    std::vector<VarDecl> decls;  // Decl
    ExprPtr expr;                // Assign/Call/Expr payload, If/While condition, Return value
    StmtPtr init;                // For init (Decl or Assign/Expr statement)
    ExprPtr cond;                // For condition
    ExprPtr step;                // For increment
    StmtPtr body;                // If then-branch, For/While body
    StmtPtr else_body;           // If else-branch
    std::vector<StmtPtr> stmts;  // Block children
    std::string label;           // Goto target / Label name
};

struct Function {
    std::string name;
    std::vector<std::string> return_type_tokens;
    int return_pointer_depth = 0;
    std::vector<VarDecl> params;
    StmtPtr body;  // Block
    LineSpan span;
};

struct Ast {
    std::vector<VarDecl> globals;
    std::vector<Function> functions;
    int line_count = 0;

    const Function* find_function(const std::string& name) const {
        for (const auto& f : functions)
            if (f.name == name) return &f;
        return nullptr;
    }
};

const char* to_string(StmtKind k);
const char* to_string(ExprKind k);

// Applies fn to every statement of the tree in pre-order (blocks included).
void for_each_stmt(const Stmt& root, const std::function<void(const Stmt&)>& fn);
void for_each_stmt(const Function& fn_def, const std::function<void(const Stmt&)>& fn);

// Applies fn to every expression reachable from the statement itself
// (not descending into child statements).
void for_each_own_expr(const Stmt& s, const std::function<void(const Expr&)>& fn);
void for_each_subexpr(const Expr& e, const std::function<void(const Expr&)>& fn);

}  // namespace cbi
