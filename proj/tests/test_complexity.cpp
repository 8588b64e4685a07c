#include <doctest.h>

#include "cbi/complexity.hpp"
#include "cbi/errors.hpp"
#include "cbi/parser.hpp"
#include "test_util.hpp"

using namespace cbi;

namespace {

DefUseTable make_table(std::initializer_list<std::tuple<const char*, int, int, int>> rows) {
    DefUseTable t;
    for (const auto& [name, def, use, line] : rows)
        t.vars[name] = DefUseCounts{def, use, line};
    return t;
}

}  // namespace

TEST_CASE("ranking sums defs and uses, descending") {
    auto r = rank_variables(make_table({{"x", 1, 2, 1}, {"y", 1, 0, 2}}));
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].name == "x");
    CHECK(r.entries[0].score == 3);
    CHECK(r.entries[1].name == "y");
    CHECK(r.entries[1].score == 1);
}

TEST_CASE("ties fall back to declaration order") {
    auto r = rank_variables(make_table({{"m", 1, 1, 3}, {"k", 0, 2, 1}, {"z", 2, 0, 2}}));
    CHECK(r.entries[0].name == "k");
    CHECK(r.entries[1].name == "z");
    CHECK(r.entries[2].name == "m");
}

TEST_CASE("empty table raises") {
    CHECK_THROWS_AS(rank_variables(DefUseTable{}), EmptyProgram);
}

TEST_CASE("duplicating every def and use preserves the order") {
    auto base = make_table({{"p", 2, 1, 4}, {"q", 1, 1, 2}, {"r", 0, 5, 9}});
    auto doubled = base;
    for (auto& [name, c] : doubled.vars) {
        c.n_def *= 2;
        c.n_use *= 2;
    }
    auto r1 = rank_variables(base);
    auto r2 = rank_variables(doubled);
    REQUIRE(r1.entries.size() == r2.entries.size());
    for (size_t i = 0; i < r1.entries.size(); ++i) {
        CHECK(r1.entries[i].name == r2.entries[i].name);
        CHECK(r2.entries[i].score == 2 * r1.entries[i].score);
    }
}

TEST_CASE("variable selection follows the small-set rule") {
    auto six = make_table({{"a", 6, 0, 1},
                           {"b", 5, 0, 2},
                           {"c", 4, 0, 3},
                           {"d", 3, 0, 4},
                           {"e", 2, 0, 5},
                           {"f", 1, 0, 6}});
    CHECK(select_variables(rank_variables(six)) ==
          std::vector<std::string>{"a", "b", "c"});

    auto two = make_table({{"a", 2, 0, 1}, {"b", 1, 0, 2}});
    CHECK(select_variables(rank_variables(two)) == std::vector<std::string>{"a"});

    auto three = make_table({{"a", 3, 0, 1}, {"b", 2, 0, 2}, {"c", 1, 0, 3}});
    CHECK(select_variables(rank_variables(three)) == std::vector<std::string>{"a"});
}

TEST_CASE("straight-line statements score 1") {
    Ast ast = parse_text("int main(){ int x = 1; x = 2; return x; }");
    auto map = statement_complexity(build_cfg(ast, "main"), ast);
    for (const auto& e : map.entries) CHECK(e.score == 1);
}

TEST_CASE("an if/else with single-statement branches scores 2") {
    Ast ast = parse_text("int a;\nint main(){ if (a) a = 1; else a = 2; return a; }");
    auto map = statement_complexity(build_cfg(ast, "main"), ast);
    int if_score = 0;
    for (const auto& e : map.entries)
        if (e.span.start == 2 && e.span.end == 2 && if_score < e.score) if_score = e.score;
    // the if statement and its branch statements all sit on line 2
    CHECK(if_score == 2);
}

TEST_CASE("innermost loop of the fixture carries the maximal score and spans 12-18") {
    Ast ast = parse(cbi_test::load_fixture("fig2_failing.c"));
    auto map = statement_complexity(build_cfg(ast, "foo"), ast);
    int max_score = 0;
    for (const auto& e : map.entries) max_score = std::max(max_score, e.score);
    CHECK(max_score == 4);
    auto [start, end] = select_location(map);
    CHECK(start == 12);
    CHECK(end == 18);
    CHECK(map.oracle_lines.empty());
}

TEST_CASE("regions overlapping oracle lines are skipped") {
    Ast ast = parse_text(
        "int a;\n"
        "int main(){\n"
        "  if (a) {\n"
        "    printf(\"%d\", a);\n"
        "  }\n"
        "  a = 1;\n"
        "  return a;\n"
        "}\n");
    auto map = statement_complexity(build_cfg(ast, "main"), ast);
    CHECK(map.oracle_lines == std::set<int>{4});
    auto [start, end] = select_location(map);
    // the if region (3-5) contains the printf line; the next best region
    // is the first straight-line statement outside it
    CHECK(start == 6);
    CHECK(end == 6);
}

TEST_CASE("no eligible region raises") {
    Ast ast = parse_text("int main(){ printf(\"x\"); return 0; }");
    auto map = statement_complexity(build_cfg(ast, "main"), ast);
    map.oracle_lines.insert(1);  // return shares the printf line already
    CHECK_THROWS_AS(select_location(map), NoEligibleLocation);
}

TEST_CASE("adding an if statement never lowers the maximal score of a region") {
    Ast plain = parse_text("int a;\nint main(){ a = 1; a = 2; return a; }");
    Ast with_if = parse_text("int a;\nint main(){ a = 1; if (a) a = 2; return a; }");
    auto score_max = [](const Ast& ast) {
        auto map = statement_complexity(build_cfg(ast, "main"), ast);
        int m = 0;
        for (const auto& e : map.entries) m = std::max(m, e.score);
        return m;
    };
    CHECK(score_max(with_if) >= score_max(plain));
}

TEST_CASE("whole-program target selection on the fixture") {
    Ast ast = parse(cbi_test::load_fixture("fig2_failing.c"));
    MutationTarget t = select_mutation_target(ast);
    CHECK(t.start_line == 12);
    CHECK(t.end_line == 18);
    // Comp-3 regime: fourteen variables are rankable
    CHECK(t.variables.size() == 3);
    CHECK(t.variables == std::vector<std::string>{"d", "e", "b"});
}
