#include <doctest.h>

#include "cbi/errors.hpp"
#include "cbi/parser.hpp"
#include "cbi/scenario.hpp"
#include "test_util.hpp"

using namespace cbi;

namespace {

Scenario s1() { return Scenario::load_file(cbi_test::data_path("scenario_s1.json")); }

std::string fig2_text() { return cbi_test::read_file(cbi_test::data_path("fig2_failing.c")); }

}  // namespace

TEST_CASE("the fixture scenario is internally consistent") {
    Scenario s = s1();
    CHECK(s.files.size() == 3);
    CHECK(s.faulty_file == "cc/opt-a.c");
    CHECK(s.base_coverage.size() == 30);
    // every dropped line exists in the base coverage (enforced on load,
    // asserted here as the fixture's own consistency check)
    for (const auto& rule : s.rules)
        for (const auto& [file, lines] : rule.drop_lines)
            for (int line : lines) CHECK(s.base_coverage.covers(file, line));
    // the baseline matches the failing program the scenario models
    ProgramFeatures f = count_features(parse_text(fig2_text()));
    CHECK(f.if_count == s.baseline.at("if"));
    CHECK(f.loop_count == s.baseline.at("loop"));
    CHECK(f.goto_count == s.baseline.at("goto"));
    CHECK(f.call_count == s.baseline.at("call"));
}

TEST_CASE("malformed scenarios are rejected") {
    CHECK_THROWS_AS(Scenario::load_json("{"), ScenarioError);
    CHECK_THROWS_AS(Scenario::load_json(R"({"files": [], "faulty_file": "x",
        "base_coverage": {}, "rules": []})"),
                    ScenarioError);
    CHECK_THROWS_AS(Scenario::load_json(R"({"files": ["a.c"], "faulty_file": "b.c",
        "base_coverage": {}, "rules": []})"),
                    ScenarioError);
    CHECK_THROWS_AS(Scenario::load_json(R"({"files": ["a.c"], "faulty_file": "a.c",
        "base_coverage": {"a.c": [1]},
        "rules": [{"feature": "warp_drive", "classification": "passing"}]})"),
                    ScenarioError);
    CHECK_THROWS_AS(Scenario::load_json(R"({"files": ["a.c"], "faulty_file": "a.c",
        "base_coverage": {"a.c": [1]},
        "rules": [{"feature": "added_if", "classification": "passing",
                   "drop": {"a.c": [99]}}]})"),
                    ScenarioError);
}

TEST_CASE("the original failing program stays failing with base coverage") {
    Scenario s = s1();
    auto [cls, spectrum] = simulate(SourceProgram::from_text("fig2", fig2_text()), s);
    CHECK(cls == Classification::Failing);
    CHECK(spectrum == s.base_coverage);
    CHECK(spectrum.files.count(s.faulty_file) == 1);
}

TEST_CASE("a variant matching the flip rule passes without the faulty lines") {
    Scenario s = s1();
    std::string variant = fig2_text();
    size_t pos = variant.find("        *m = j;");
    REQUIRE(pos != std::string::npos);
    variant.insert(pos, "        if (a == 0) { v = s; }\n");
    auto [cls, spectrum] = simulate(SourceProgram::from_text("v1", variant), s);
    CHECK(cls == Classification::Passing);
    CHECK(spectrum.files.count("cc/opt-a.c") == 0);
    CHECK(spectrum.covers("cc/opt-b.c", 1));
    CHECK(spectrum.size() == 20);
}

TEST_CASE("rules match in order and support loops, calls, gotos, and text") {
    Scenario s = s1();
    std::string with_loop = fig2_text();
    size_t pos = with_loop.find("  foo();");
    REQUIRE(pos != std::string::npos);
    with_loop.insert(pos, "  while (s < 0) { s++; }\n");
    auto [cls1, sp1] = simulate(SourceProgram::from_text("v2", with_loop), s);
    CHECK(cls1 == Classification::Passing);
    CHECK(sp1.covers("cc/opt-a.c", 1));
    CHECK(!sp1.covers("cc/opt-a.c", 6));

    std::string with_call = fig2_text();
    pos = with_call.find("  return 0;");
    with_call.insert(pos, "  foo();\n");
    auto [cls2, sp2] = simulate(SourceProgram::from_text("v3", with_call), s);
    CHECK(cls2 == Classification::Passing);
    CHECK(!sp2.covers("cc/opt-a.c", 1));
    CHECK(sp2.covers("cc/opt-a.c", 6));

    std::string with_goto = fig2_text();
    pos = with_goto.find("  return 0;");
    with_goto.insert(pos, "  goto L;\nL:\n");
    auto [cls3, sp3] = simulate(SourceProgram::from_text("v4", with_goto), s);
    CHECK(cls3 == Classification::Failing);
    CHECK(sp3 == s.base_coverage);

    std::string with_marker = fig2_text() + "volatile long long zz;\n";
    auto [cls4, sp4] = simulate(SourceProgram::from_text("v5", with_marker), s);
    CHECK(cls4 == Classification::Discard);
}

TEST_CASE("feature counting sees calls in every position exactly once") {
    ProgramFeatures f = count_features(parse_text(
        "int g;\n"
        "int get() { return 2; }\n"
        "int main(){ for (g = get(); g > 0; g--) { get(); } return get(); }"));
    CHECK(f.call_count == 3);
    CHECK(f.loop_count == 1);
}

TEST_CASE("an unparseable candidate is discarded") {
    Scenario s = s1();
    auto [cls, spectrum] = simulate(SourceProgram::from_text("junk", "this is not C"), s);
    CHECK(cls == Classification::Discard);
    CHECK(spectrum.empty());
}

TEST_CASE("simulation is a pure function of program text and scenario") {
    Scenario s = s1();
    std::string variant = fig2_text();
    variant.insert(variant.find("  foo();"), "  if (b) { b = 0; }\n");
    SourceProgram p = SourceProgram::from_text("v", variant);
    auto r1 = simulate(p, s);
    auto r2 = simulate(p, s);
    CHECK(r1.first == r2.first);
    CHECK(r1.second == r2.second);
}

TEST_CASE("region-restricted rules require the statement inside the region") {
    Scenario s = Scenario::load_json(R"({
        "files": ["f.c"], "faulty_file": "f.c",
        "base_coverage": {"f.c": [1, 2, 3]},
        "baseline": {"if": 0, "loop": 0, "goto": 0, "call": 0},
        "rules": [{"feature": "added_if", "region": [1, 3],
                   "classification": "passing", "drop": {"f.c": [1]}}]
    })");
    auto [cls_in, sp_in] =
        simulate(SourceProgram::from_text("in", "int a;\nint main(){ if (a) a = 1;\n return a; }"), s);
    CHECK(cls_in == Classification::Passing);
    auto [cls_out, sp_out] = simulate(
        SourceProgram::from_text("out", "int a;\nint b;\nint c;\nint main(){ if (a) a = 1; return a; }"),
        s);
    CHECK(cls_out == Classification::Failing);
}
