#pragma once

#include <map>
#include <string>
#include <vector>

#include "cbi/spectra.hpp"

namespace cbi {

// Suspiciousness of one failing-covered statement given how many passing
// programs also cover it: 1 / sqrt(1 + ep).
double statement_score(int ep);

struct FileRanking {
    struct Entry {
        std::string file;
        double score;
        int rank;  // worst position within an equal-score group
    };
    std::vector<Entry> entries;

    int rank_of(const std::string& file) const {
        for (const auto& e : entries)
            if (e.file == file) return e.rank;
        return -1;
    }
};

// Per-file ep counts for every statement the failing program covers.
struct SpectrumStats {
    // file -> line -> number of passing programs covering it
    std::map<std::string, std::map<int, int>> ep;
};

SpectrumStats collect_stats(const SpectrumSet& set);

// Mean statement score over the failing-covered statements of one file.
// Throws UncoveredFile when the file has no failing-covered statements.
double file_score(const SpectrumStats& stats, const std::string& file);

std::map<std::string, double> score_files(const SpectrumSet& set);

// Descending by score (rounded to 12 decimals before comparison); a tie
// group of size k ending at position p all receive rank p. Entries within
// a group list lexicographically.
FileRanking rank_files(const std::map<std::string, double>& scores);

struct EvalMetrics {
    std::map<int, int> top_n;  // N in {1, 5, 10, 20}
    double mfr = 0;
    double mar = 0;
};

struct BugResult {
    std::string bug_id;
    FileRanking ranking;
    std::vector<std::string> faulty_files;  // ground truth
};

// Top-N / MFR / MAR over a benchmark of bugs. Throws MissingGroundTruth
// when a bug has no faulty file present in its ranking.
EvalMetrics eval_metrics(const std::vector<BugResult>& bugs);

std::string ranking_to_text(const FileRanking& ranking);
std::string ranking_to_json(const FileRanking& ranking);

}  // namespace cbi
