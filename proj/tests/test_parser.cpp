#include <doctest.h>

#include <set>

#include "cbi/ast_print.hpp"
#include "cbi/errors.hpp"
#include "cbi/parser.hpp"
#include "test_util.hpp"

using namespace cbi;

TEST_CASE("minimal program parses to one function with one statement") {
    Ast ast = parse_text("int main(){return 0;}");
    REQUIRE(ast.functions.size() == 1);
    CHECK(ast.functions[0].name == "main");
    CHECK(ast.functions[0].body->stmts.size() == 1);
    CHECK(ast.functions[0].body->stmts[0]->kind == StmtKind::Return);
}

TEST_CASE("failing-program fixture yields the expected globals and functions") {
    Ast ast = parse(cbi_test::load_fixture("fig2_failing.c"));
    std::set<std::string> globals;
    for (const auto& g : ast.globals) globals.insert(g.name);
    CHECK(globals == std::set<std::string>{"s", "a", "b", "c", "v", "u"});
    REQUIRE(ast.functions.size() == 2);
    CHECK(ast.functions[0].name == "foo");
    CHECK(ast.functions[1].name == "main");
    CHECK(ast.line_count == 26);

    const auto& u = *std::find_if(ast.globals.begin(), ast.globals.end(),
                                  [](const VarDecl& d) { return d.name == "u"; });
    CHECK(u.is_array);
    CHECK(u.declared_size() == 6);
}

TEST_CASE("malformed expression raises a syntax error naming the line") {
    try {
        parse_text("int main(){ x = ; }");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(std::string(e.what()).find(";") != std::string::npos);
    }
}

TEST_CASE("constructs outside the subset fail loudly") {
    CHECK_THROWS_AS(parse_text("struct S { int x; };"), SyntaxError);
    CHECK_THROWS_AS(parse_text("int main(){ switch (1) {} }"), SyntaxError);
    CHECK_THROWS_AS(parse_text("typedef int t; int main(){return 0;}"), SyntaxError);
    CHECK_THROWS_AS(parse_text("int main(){ do { } while (1); }"), SyntaxError);
    CHECK_THROWS_AS(parse_text("union U { int x; };"), SyntaxError);
}

TEST_CASE("goto to a missing label is rejected") {
    CHECK_THROWS_AS(parse_text("int main(){ goto L; return 0; }"), SyntaxError);
    CHECK_NOTHROW(parse_text("int main(){ goto L; L: return 0; }"));
}

TEST_CASE("statement kinds are classified") {
    Ast ast = parse_text(
        "int g;\n"
        "void f() {\n"
        "  int x = 1;\n"
        "  x = 2;\n"
        "  x++;\n"
        "  f();\n"
        "  x + 1;\n"
        "  if (x) { g = 1; } else g = 2;\n"
        "  while (x) x--;\n"
        "  for (x = 0; x < 3; x++) g += x;\n"
        "}\n");
    const auto& body = ast.functions[0].body->stmts;
    CHECK(body[0]->kind == StmtKind::Decl);
    CHECK(body[1]->kind == StmtKind::Assign);
    CHECK(body[2]->kind == StmtKind::Assign);
    CHECK(body[3]->kind == StmtKind::Call);
    CHECK(body[4]->kind == StmtKind::Expr);
    CHECK(body[5]->kind == StmtKind::If);
    CHECK(body[6]->kind == StmtKind::While);
    CHECK(body[7]->kind == StmtKind::For);
}

TEST_CASE("line spans are 1-based, inclusive, and nest") {
    Ast ast = parse(cbi_test::load_fixture("fig2_failing.c"));
    const Function& foo = ast.functions[0];
    CHECK(foo.span.start == 5);
    CHECK(foo.span.end == 22);
    bool saw_inner_for = false;
    for_each_stmt(foo, [&](const Stmt& s) {
        CHECK(s.span.start >= 1);
        CHECK(s.span.end <= ast.line_count);
        CHECK(s.span.start <= s.span.end);
        if (s.kind == StmtKind::For && s.span.start == 12) {
            saw_inner_for = true;
            CHECK(s.span.end == 18);
        }
    });
    CHECK(saw_inner_for);
}

TEST_CASE("parse-print-parse is structurally idempotent") {
    const char* snippets[] = {
        "int main(){return 0;}",
        "int x = 1; int y[] = {1, 2, 3};\nint main(){ y[0] = x ? 1 : 2; return y[0]; }",
        "int a; void f(int p){ p = a << 2; }\nint main(){ f(3); while (a) a--; return 0; }",
        "int g;\nint main(){ L: g++; if (g < 3) goto L; for (int i = 0; i < 2; i++) g += i;\n"
        "  printf(\"%d\\n\", g); return 0; }",
    };
    for (const char* text : snippets) {
        Ast first = parse_text(text);
        Ast second = parse_text(pretty_print(first));
        CHECK(structural_signature(first) == structural_signature(second));
    }
    Ast fig2 = parse(cbi_test::load_fixture("fig2_failing.c"));
    Ast reparsed = parse_text(pretty_print(fig2));
    CHECK(structural_signature(fig2) == structural_signature(reparsed));
}

TEST_CASE("ast json dump is stable and carries kinds plus spans") {
    Ast ast = parse_text("int main(){ if (1) return 0; return 1; }");
    std::string a = ast_to_json(ast);
    std::string b = ast_to_json(parse_text("int main(){ if (1) return 0; return 1; }"));
    CHECK(a == b);
    CHECK(a.find("\"kind\": \"if\"") != std::string::npos);
    CHECK(a.find("\"span\"") != std::string::npos);
}
