#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "cbi/errors.hpp"
#include "cbi/validation.hpp"
#include "test_util.hpp"

using namespace cbi;

namespace {

SourceProgram prog(const std::string& text) {
    return SourceProgram::from_text("t", text);
}

}  // namespace

TEST_CASE("shift by a negative constant is flagged on its line") {
    auto report = semantic_validate(cbi_test::load_fixture("fig8_shift.c"));
    REQUIRE(report.verdict == Verdict::SemanticInvalid);
    CHECK(report.cause == UbCategory::Shift);
    CHECK(report.line == 11);
}

TEST_CASE("constant out-of-bounds index is flagged") {
    auto report = semantic_validate(prog("int u[3];\nint main(){ u[5] = 0; return 0; }"));
    REQUIRE(report.verdict == Verdict::SemanticInvalid);
    CHECK(report.cause == UbCategory::IndexBound);
}

TEST_CASE("use before any def is flagged") {
    auto report = semantic_validate(prog("int main(){ int x; int y = x; return y; }"));
    REQUIRE(report.verdict == Verdict::SemanticInvalid);
    CHECK(report.cause == UbCategory::Initialization);
}

TEST_CASE("constant division by zero is flagged") {
    auto report = semantic_validate(prog("int main(){ int x = 1 / 0; return x; }"));
    REQUIRE(report.verdict == Verdict::SemanticInvalid);
    CHECK(report.cause == UbCategory::DivisionByZero);
}

TEST_CASE("null and out-of-object dereferences are flagged") {
    auto r1 = semantic_validate(prog("int main(){ int *p = 0; *p = 1; return 0; }"));
    CHECK(r1.cause == UbCategory::MemAccess);
    auto r2 = semantic_validate(prog("int main(){ int x = 0; int *p = &x; *(p + 3) = 1; return 0; }"));
    CHECK(r2.cause == UbCategory::MemAccess);
}

TEST_CASE("the first finding in line order wins") {
    auto report = semantic_validate(prog(
        "int main(){\n"
        "  int a = 1 << 40;\n"
        "  int b = 1 / 0;\n"
        "  return a + b;\n"
        "}"));
    REQUIRE(report.verdict == Verdict::SemanticInvalid);
    CHECK(report.cause == UbCategory::Shift);
    CHECK(report.line == 2);
}

TEST_CASE("initialization tracking follows evaluation order in for loops") {
    auto ok = semantic_validate(prog("int main(){ int i; for (i = 0; i < 3; i++) {} return i; }"));
    CHECK(ok.valid());
    auto bad = semantic_validate(prog("int main(){ int i; int j = i; for (i = 0; i < 3; i++) {} return j; }"));
    CHECK(bad.cause == UbCategory::Initialization);
}

TEST_CASE("a fully initialized constant-free program validates clean") {
    std::mt19937 rng(1234);
    for (int iter = 0; iter < 50; ++iter) {
        int nvars = 2 + static_cast<int>(rng() % 5);
        std::string text = "int main() {\n";
        for (int v = 0; v < nvars; ++v)
            text += "  int v" + std::to_string(v) + " = " + std::to_string(1 + rng() % 9) + ";\n";
        const char* ops[] = {" + ", " - ", " * "};
        for (int s = 0; s < 6; ++s) {
            int a = static_cast<int>(rng() % static_cast<unsigned>(nvars));
            int b = static_cast<int>(rng() % static_cast<unsigned>(nvars));
            int c = static_cast<int>(rng() % static_cast<unsigned>(nvars));
            text += "  v" + std::to_string(a) + " = v" + std::to_string(b) +
                    ops[rng() % 3] + "v" + std::to_string(c) + ";\n";
        }
        text += "  return v0;\n}\n";
        CAPTURE(text);
        CHECK(semantic_validate(prog(text)).valid());
    }
}

TEST_CASE("the seeded corpus is classified category by category") {
    namespace fs = std::filesystem;
    int invalid_checked = 0;
    for (const auto& entry : fs::directory_iterator(cbi_test::data_path("ub_corpus/invalid"))) {
        std::string name = entry.path().filename().string();
        std::string expected = name.substr(0, name.rfind('_'));
        auto report = semantic_validate(
            SourceProgram::from_text(name, cbi_test::read_file(entry.path().string())));
        CAPTURE(name);
        REQUIRE(report.verdict == Verdict::SemanticInvalid);
        CHECK(to_string(*report.cause) == expected);
        ++invalid_checked;
    }
    CHECK(invalid_checked == 15);
    int clean_checked = 0;
    for (const auto& entry : fs::directory_iterator(cbi_test::data_path("ub_corpus/clean"))) {
        auto report = semantic_validate(SourceProgram::from_text(
            entry.path().filename().string(), cbi_test::read_file(entry.path().string())));
        CAPTURE(entry.path().filename().string());
        CHECK(report.valid());
        ++clean_checked;
    }
    CHECK(clean_checked == 15);
}

TEST_CASE("external analyzer findings merge onto the five categories") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cbi-analyzer-stub";
    fs::create_directories(dir);
    fs::path script = dir / "stub.sh";
    {
        std::ofstream out(script);
        out << "#!/bin/sh\necho 'mem_access:12:out-of-bound read'\n";
    }
    fs::permissions(script, fs::perms::owner_all);
    auto report = semantic_validate(prog("int main(){ int x = 0; return x; }"), script.string());
    REQUIRE(report.verdict == Verdict::SemanticInvalid);
    CHECK(report.cause == UbCategory::MemAccess);
    CHECK(report.line == 12);
    CHECK(report.note == "out-of-bound read");

    fs::path failing = dir / "fail.sh";
    {
        std::ofstream out(failing);
        out << "#!/bin/sh\nexit 3\n";
    }
    fs::permissions(failing, fs::perms::owner_all);
    CHECK_THROWS_AS(semantic_validate(prog("int main(){ return 0; }"), failing.string()),
                    AnalyzerFailure);

    fs::path garbled = dir / "garbled.sh";
    {
        std::ofstream out(garbled);
        out << "#!/bin/sh\necho 'not a finding'\n";
    }
    fs::permissions(garbled, fs::perms::owner_all);
    CHECK_THROWS_AS(semantic_validate(prog("int main(){ return 0; }"), garbled.string()),
                    AnalyzerFailure);
    fs::remove_all(dir);
}

TEST_CASE("built-in findings on earlier lines outrank analyzer findings") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cbi-analyzer-stub2";
    fs::create_directories(dir);
    fs::path script = dir / "stub.sh";
    {
        std::ofstream out(script);
        out << "#!/bin/sh\necho 'mem_access:9:late finding'\n";
    }
    fs::permissions(script, fs::perms::owner_all);
    auto report = semantic_validate(prog("int main(){ int x = 1 / 0; return x; }"), script.string());
    CHECK(report.cause == UbCategory::DivisionByZero);
    CHECK(report.line == 1);
    fs::remove_all(dir);
}

TEST_CASE("oracle counts must match exactly") {
    SourceProgram failing = prog("int main(){ printf(\"%d\\n\", 1); return 0; }");
    CHECK(oracle_validate(failing, failing).valid());

    SourceProgram dropped = prog("int main(){ return 0; }");
    auto r1 = oracle_validate(dropped, failing);
    REQUIRE(r1.verdict == Verdict::OracleInvalid);
    CHECK(r1.oracle->expected_printf == 1);
    CHECK(r1.oracle->found_printf == 0);

    SourceProgram extra = prog("int main(){ printf(\"a\"); printf(\"b\"); return 0; }");
    auto r2 = oracle_validate(extra, failing);
    REQUIRE(r2.verdict == Verdict::OracleInvalid);
    CHECK(r2.oracle->expected_printf == 1);
    CHECK(r2.oracle->found_printf == 2);

    // swapping arguments flips expected and found
    auto r3 = oracle_validate(failing, extra);
    CHECK(r3.oracle->expected_printf == 2);
    CHECK(r3.oracle->found_printf == 1);
}

TEST_CASE("abort counts participate in the oracle") {
    SourceProgram failing = prog("int main(){ if (1) abort(); return 0; }");
    SourceProgram candidate = prog("int main(){ return 0; }");
    auto r = oracle_validate(candidate, failing);
    REQUIRE(r.verdict == Verdict::OracleInvalid);
    CHECK(r.oracle->expected_abort == 1);
    CHECK(r.oracle->found_abort == 0);
}
