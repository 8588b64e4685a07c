#include <doctest.h>

#include <random>

#include "cbi/errors.hpp"
#include "cbi/spectra.hpp"

using namespace cbi;

namespace {

CoverageSpectrum spec(std::initializer_list<std::pair<const char*, std::initializer_list<int>>> files) {
    CoverageSpectrum s;
    for (const auto& [file, lines] : files)
        for (int l : lines) s.add(file, l);
    return s;
}

CoverageSpectrum random_spectrum(std::mt19937& rng, int max_files = 4, int max_lines = 12) {
    CoverageSpectrum s;
    int nf = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_files));
    for (int f = 0; f < nf; ++f) {
        int nl = static_cast<int>(rng() % static_cast<unsigned>(max_lines));
        for (int i = 0; i < nl; ++i)
            s.add("f" + std::to_string(f), 1 + static_cast<int>(rng() % 30));
    }
    return s;
}

}  // namespace

TEST_CASE("jaccard distance point values") {
    auto a = spec({{"x.c", {1, 2, 3}}});
    CHECK(jaccard_dist(a, a) == 0.0);
    auto b = spec({{"y.c", {4, 5}}});
    CHECK(jaccard_dist(a, b) == 1.0);
    auto c = spec({{"x.c", {1, 2, 7, 8}}});
    CHECK(jaccard_dist(a, c) == doctest::Approx(1.0 - 2.0 / 5.0));
    auto d = spec({{"x.c", {1, 2}}});
    auto e = spec({{"x.c", {1, 2, 9, 10}}});
    CHECK(jaccard_dist(d, e) == doctest::Approx(0.5));
    CHECK(jaccard_dist(CoverageSpectrum{}, CoverageSpectrum{}) == 0.0);
}

TEST_CASE("similarity is the mean closeness to the failing spectrum") {
    SpectrumSet set;
    set.failing = spec({{"x.c", {1, 2, 3}}});
    set.passing = {set.failing};
    CHECK(similarity(set) == 1.0);
    set.passing = {spec({{"z.c", {9}}})};
    CHECK(similarity(set) == 0.0);

    SpectrumSet pair;
    pair.failing = spec({{"x.c", {1, 2, 3, 4, 5}}});
    pair.passing = {spec({{"x.c", {1, 2, 3, 4}}}), spec({{"x.c", {1, 2, 3}}})};
    double d1 = jaccard_dist(pair.passing[0], pair.failing);
    double d2 = jaccard_dist(pair.passing[1], pair.failing);
    CHECK(similarity(pair) == doctest::Approx(((1 - d1) + (1 - d2)) / 2));

    SpectrumSet empty;
    empty.failing = set.failing;
    CHECK_THROWS_AS(similarity(empty), EmptyPassingSet);
}

TEST_CASE("diversity is the mean pairwise distance") {
    SpectrumSet set;
    set.failing = spec({{"x.c", {1}}});
    auto a = spec({{"x.c", {1, 2}}});
    set.passing = {a, a};
    CHECK(diversity(set) == 0.0);
    set.passing = {spec({{"x.c", {1}}}), spec({{"y.c", {2}}})};
    CHECK(diversity(set) == 1.0);
    set.passing = {a};
    CHECK(diversity(set) == 0.0);  // singleton convention
    SpectrumSet empty;
    CHECK_THROWS_AS(diversity(empty), EmptyPassingSet);
}

TEST_CASE("quality follows the linear combination") {
    // n=1, sim=1, div=0, alpha=0.5 -> 0.5
    SpectrumSet one;
    one.failing = spec({{"x.c", {1, 2}}});
    one.passing = {one.failing};
    QualityState q1 = quality(one, 0.5);
    CHECK(q1.q == doctest::Approx(0.5));
    CHECK(q1.n == 1);

    // first acceptance: delta against the empty state equals Q_1
    QualityState q0;
    CHECK(delta_quality(q1, q0) == doctest::Approx(0.5));

    // hand-constructed n=2 state: sim 0.7, div 0.4 -> Q = 2*(0.5*0.4+0.5*0.7) = 1.1
    QualityState manual;
    manual.n = 2;
    manual.sim = 0.7;
    manual.div = 0.4;
    manual.alpha = 0.5;
    manual.q = manual.n * (manual.alpha * manual.div + (1 - manual.alpha) * manual.sim);
    CHECK(manual.q == doctest::Approx(1.1));
}

TEST_CASE("distance is a pseudometric and measures stay in range") {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 300; ++iter) {
        auto a = random_spectrum(rng);
        auto b = random_spectrum(rng);
        auto c = random_spectrum(rng);
        double ab = jaccard_dist(a, b);
        double ba = jaccard_dist(b, a);
        double ac = jaccard_dist(a, c);
        double cb = jaccard_dist(c, b);
        CHECK(ab == ba);
        CHECK(jaccard_dist(a, a) == 0.0);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab <= ac + cb + 1e-12);  // triangle inequality

        SpectrumSet set;
        set.failing = a;
        set.passing = {b, c};
        double sim = similarity(set);
        double div = diversity(set);
        CHECK(sim >= 0.0);
        CHECK(sim <= 1.0);
        CHECK(div >= 0.0);
        CHECK(div <= 1.0);
    }
}

TEST_CASE("appending a copy of the failing spectrum never lowers similarity") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 100; ++iter) {
        SpectrumSet set;
        set.failing = random_spectrum(rng);
        int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) set.passing.push_back(random_spectrum(rng));
        double before = similarity(set);
        set.passing.push_back(set.failing);
        CHECK(similarity(set) >= before - 1e-12);
    }
}
