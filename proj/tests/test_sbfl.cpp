#include <doctest.h>

#include <random>

#include "cbi/errors.hpp"
#include "cbi/sbfl.hpp"
#include "sbfl_oracle.hpp"

using namespace cbi;

TEST_CASE("statement score point values") {
    CHECK(statement_score(0) == 1.0);
    CHECK(statement_score(3) == 0.5);
    CHECK(statement_score(8) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("file score averages failing-covered statements") {
    SpectrumSet set;
    set.failing.add("a.c", 1);
    CHECK(score_files(set).at("a.c") == 1.0);

    SpectrumSet two;
    two.failing.add("a.c", 1);
    two.failing.add("a.c", 2);
    for (int i = 0; i < 3; ++i) {
        CoverageSpectrum p;
        p.add("a.c", 2);
        two.passing.push_back(p);
    }
    // ep = {0, 3} -> mean of 1.0 and 0.5
    CHECK(score_files(two).at("a.c") == doctest::Approx(0.75));

    SpectrumSet all_covered;
    all_covered.failing.add("a.c", 1);
    all_covered.failing.add("a.c", 2);
    for (int i = 0; i < 5; ++i) all_covered.passing.push_back(all_covered.failing);
    CHECK(score_files(all_covered).at("a.c") == doctest::Approx(1.0 / std::sqrt(6.0)));
}

TEST_CASE("an empty witness set exonerates nothing") {
    SpectrumSet set;
    set.failing.add("a.c", 1);
    set.failing.add("b.c", 2);
    auto scores = score_files(set);
    CHECK(scores.at("a.c") == 1.0);
    CHECK(scores.at("b.c") == 1.0);
    FileRanking r = rank_files(scores);
    CHECK(r.rank_of("a.c") == 2);  // full tie, worst rank
    CHECK(r.rank_of("b.c") == 2);
}

TEST_CASE("uncovered file raises") {
    SpectrumSet set;
    set.failing.add("a.c", 1);
    SpectrumStats stats = collect_stats(set);
    CHECK_THROWS_AS(file_score(stats, "other.c"), UncoveredFile);
}

TEST_CASE("ranking is descending with worst-rank ties") {
    FileRanking r1 = rank_files({{"A", 0.9}, {"B", 0.5}});
    CHECK(r1.rank_of("A") == 1);
    CHECK(r1.rank_of("B") == 2);

    FileRanking r2 = rank_files({{"A", 0.9}, {"B", 0.9}, {"C", 0.5}});
    CHECK(r2.rank_of("A") == 2);
    CHECK(r2.rank_of("B") == 2);
    CHECK(r2.rank_of("C") == 3);
    // tie group lists lexicographically
    CHECK(r2.entries[0].file == "A");
    CHECK(r2.entries[1].file == "B");

    FileRanking r3 = rank_files({{"only.c", 0.3}});
    CHECK(r3.rank_of("only.c") == 1);
}

TEST_CASE("ranking ignores sub-rounding noise") {
    double noisy = 0.5 + 1e-14;
    FileRanking r = rank_files({{"A", 0.5}, {"B", noisy}});
    CHECK(r.rank_of("A") == 2);
    CHECK(r.rank_of("B") == 2);
}

TEST_CASE("adding a passing spectrum never raises a statement score") {
    std::mt19937 rng(2024);
    for (int iter = 0; iter < 50; ++iter) {
        SpectrumSet set;
        for (int l = 1; l <= 20; ++l)
            if (rng() % 2) set.failing.add("f.c", l);
        set.failing.add("f.c", 21);
        int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            CoverageSpectrum p;
            for (int l = 1; l <= 21; ++l)
                if (rng() % 2) p.add("f.c", l);
            set.passing.push_back(p);
        }
        SpectrumStats before = collect_stats(set);
        CoverageSpectrum extra;
        for (int l = 1; l <= 21; ++l)
            if (rng() % 2) extra.add("f.c", l);
        set.passing.push_back(extra);
        SpectrumStats after = collect_stats(set);
        for (const auto& [file, lines] : before.ep)
            for (const auto& [line, ep] : lines)
                CHECK(statement_score(after.ep.at(file).at(line)) <= statement_score(ep));
    }
}

TEST_CASE("module output matches the from-definition recomputation") {
    std::mt19937 rng(5150);
    for (int iter = 0; iter < 200; ++iter) {
        SpectrumSet set = cbi_test::random_instance(rng, 6, 30, 5);
        auto module_scores = score_files(set);
        auto oracle_scores = cbi_test::oracle_scores(set);
        REQUIRE(module_scores.size() == oracle_scores.size());
        for (const auto& [file, score] : oracle_scores) {
            REQUIRE(module_scores.count(file) == 1);
            CHECK(module_scores.at(file) == score);  // bit-exact
        }
        FileRanking module_ranks = rank_files(module_scores);
        auto oracle_ranks = cbi_test::oracle_ranks(oracle_scores);
        for (const auto& e : module_ranks.entries) {
            CHECK(oracle_ranks.at(e.file) == e.rank);
        }
    }
}

TEST_CASE("metrics over hand-built bugs") {
    auto mk = [](std::initializer_list<std::pair<const char*, int>> files) {
        FileRanking r;
        for (const auto& [f, rank] : files) r.entries.push_back({f, 0.0, rank});
        return r;
    };

    SUBCASE("single bug at rank 1") {
        BugResult bug{"b1", mk({{"f", 1}}), {"f"}};
        EvalMetrics m = eval_metrics({bug});
        CHECK(m.top_n[1] == 1);
        CHECK(m.mfr == 1.0);
        CHECK(m.mar == 1.0);
    }

    SUBCASE("two bugs with first-faulty ranks 3 and 7") {
        BugResult b1{"b1", mk({{"x", 3}}), {"x"}};
        BugResult b2{"b2", mk({{"y", 7}}), {"y"}};
        EvalMetrics m = eval_metrics({b1, b2});
        CHECK(m.top_n[1] == 0);
        CHECK(m.top_n[5] == 1);
        CHECK(m.top_n[10] == 2);
        CHECK(m.top_n[20] == 2);
        CHECK(m.mfr == 5.0);
    }

    SUBCASE("a bug with two faulty files at ranks 2 and 6") {
        BugResult bug{"b1", mk({{"p", 2}, {"q", 6}}), {"p", "q"}};
        EvalMetrics m = eval_metrics({bug});
        CHECK(m.mfr == 2.0);
        CHECK(m.mar == 4.0);
    }

    SUBCASE("missing ground truth raises") {
        BugResult bug{"b1", mk({{"p", 1}}), {"absent"}};
        CHECK_THROWS_AS(eval_metrics({bug}), MissingGroundTruth);
    }
}

TEST_CASE("top-n counts are monotone and MFR never exceeds MAR") {
    std::mt19937 rng(31337);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<BugResult> bugs;
        int nbugs = 1 + static_cast<int>(rng() % 6);
        for (int b = 0; b < nbugs; ++b) {
            FileRanking ranking;
            int nfiles = 2 + static_cast<int>(rng() % 30);
            for (int f = 0; f < nfiles; ++f)
                ranking.entries.push_back({"f" + std::to_string(f), 0.0, f + 1});
            std::vector<std::string> faulty;
            int nfaulty = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < nfaulty; ++k)
                faulty.push_back("f" + std::to_string(rng() % static_cast<unsigned>(nfiles)));
            bugs.push_back({"b" + std::to_string(b), std::move(ranking), std::move(faulty)});
        }
        EvalMetrics m = eval_metrics(bugs);
        CHECK(m.top_n.at(1) <= m.top_n.at(5));
        CHECK(m.top_n.at(5) <= m.top_n.at(10));
        CHECK(m.top_n.at(10) <= m.top_n.at(20));
        CHECK(m.mfr <= m.mar + 1e-12);
    }
}

TEST_CASE("report renderings carry file, score, and rank") {
    FileRanking r = rank_files({{"A", 0.75}, {"B", 0.5}});
    std::string text = ranking_to_text(r);
    CHECK(text.find("A") != std::string::npos);
    CHECK(text.find("0.75") != std::string::npos);
    std::string json = ranking_to_json(r);
    CHECK(json.find("\"rank\": 1") != std::string::npos);
    CHECK(json.find("\"file\": \"A\"") != std::string::npos);
}
