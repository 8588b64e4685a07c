#pragma once

// From-definition recomputation of the simplified-Ochiai file scores and
// worst-rank assignment, used to cross-check the sbfl module.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cbi/spectra.hpp"

namespace cbi_test {

inline cbi::SpectrumSet random_instance(std::mt19937& rng, int max_files, int max_statements,
                                        int max_passing) {
    cbi::SpectrumSet set;
    int nf = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_files));
    int total = 0;
    for (int f = 0; f < nf && total < max_statements; ++f) {
        std::string file = "file" + std::to_string(f) + ".c";
        int nl = 1 + static_cast<int>(rng() % 9);
        for (int i = 0; i < nl && total < max_statements; ++i, ++total)
            set.failing.add(file, 1 + static_cast<int>(rng() % 60));
    }
    int np = static_cast<int>(rng() % static_cast<unsigned>(max_passing + 1));
    for (int p = 0; p < np; ++p) {
        cbi::CoverageSpectrum ps;
        for (const auto& [file, lines] : set.failing.files)
            for (int line : lines)
                if (rng() % 2) ps.add(file, line);
        // occasionally cover lines the failing run never touched
        if (rng() % 3 == 0) ps.add("extra.c", static_cast<int>(1 + rng() % 10));
        set.passing.push_back(ps);
    }
    return set;
}

// score(s) = 1/sqrt(1+ep); SCORE(f) = sum(score)/n_f over failing-covered
// statements, counting ep directly per statement.
inline std::map<std::string, double> oracle_scores(const cbi::SpectrumSet& set) {
    std::map<std::string, double> out;
    for (const auto& [file, lines] : set.failing.files) {
        if (lines.empty()) continue;
        double sum = 0;
        for (int line : lines) {
            int ep = 0;
            for (const auto& p : set.passing)
                if (p.covers(file, line)) ++ep;
            sum += 1.0 / std::sqrt(1.0 + ep);
        }
        out[file] = sum / static_cast<double>(lines.size());
    }
    return out;
}

// Every file's rank is the worst (largest) position among the files whose
// rounded score ties with it.
inline std::map<std::string, int> oracle_ranks(const std::map<std::string, double>& scores) {
    auto key = [](double s) { return std::llround(s * 1e12); };
    std::vector<std::pair<std::string, double>> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
        if (key(a.second) != key(b.second)) return key(a.second) > key(b.second);
        return a.first < b.first;
    });
    std::map<std::string, int> ranks;
    for (size_t i = 0; i < sorted.size(); ++i) {
        int worst = static_cast<int>(i) + 1;
        for (size_t j = i + 1; j < sorted.size(); ++j)
            if (key(sorted[j].second) == key(sorted[i].second)) worst = static_cast<int>(j) + 1;
        ranks[sorted[i].first] = worst;
    }
    return ranks;
}

}  // namespace cbi_test
