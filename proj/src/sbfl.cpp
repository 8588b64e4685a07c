#include "cbi/sbfl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cbi/errors.hpp"

namespace cbi {

double statement_score(int ep) {
    return 1.0 / std::sqrt(1.0 + static_cast<double>(ep));
}

SpectrumStats collect_stats(const SpectrumSet& set) {
    SpectrumStats stats;
    // only statements executed by the failing program participate
    for (const auto& [file, lines] : set.failing.files)
        for (int line : lines) stats.ep[file][line] = 0;
    for (const auto& passing : set.passing)
        for (auto& [file, lines] : stats.ep) {
            auto it = passing.files.find(file);
            if (it == passing.files.end()) continue;
            for (auto& [line, count] : lines)
                if (it->second.count(line)) ++count;
        }
    return stats;
}

double file_score(const SpectrumStats& stats, const std::string& file) {
    auto it = stats.ep.find(file);
    if (it == stats.ep.end() || it->second.empty()) throw UncoveredFile(file);
    double sum = 0;
    for (const auto& [line, ep] : it->second) sum += statement_score(ep);
    return sum / static_cast<double>(it->second.size());
}

std::map<std::string, double> score_files(const SpectrumSet& set) {
    SpectrumStats stats = collect_stats(set);
    std::map<std::string, double> scores;
    for (const auto& [file, lines] : stats.ep)
        if (!lines.empty()) scores[file] = file_score(stats, file);
    return scores;
}

namespace {

// Exact-equality ties after rounding, so summation order cannot split a group.
long long rounded_key(double score) {
    return std::llround(score * 1e12);
}

}  // namespace

FileRanking rank_files(const std::map<std::string, double>& scores) {
    if (scores.empty()) throw Error("no scored files to rank");
    FileRanking ranking;
    for (const auto& [file, score] : scores) ranking.entries.push_back({file, score, 0});
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const FileRanking::Entry& a, const FileRanking::Entry& b) {
                  long long ka = rounded_key(a.score), kb = rounded_key(b.score);
                  if (ka != kb) return ka > kb;
                  return a.file < b.file;
              });
    size_t i = 0;
    while (i < ranking.entries.size()) {
        size_t j = i;
        while (j + 1 < ranking.entries.size() &&
               rounded_key(ranking.entries[j + 1].score) == rounded_key(ranking.entries[i].score))
            ++j;
        for (size_t k = i; k <= j; ++k) ranking.entries[k].rank = static_cast<int>(j) + 1;
        i = j + 1;
    }
    return ranking;
}

EvalMetrics eval_metrics(const std::vector<BugResult>& bugs) {
    EvalMetrics m;
    const int ns[] = {1, 5, 10, 20};
    for (int n : ns) m.top_n[n] = 0;
    double mfr_sum = 0, mar_sum = 0;
    for (const auto& bug : bugs) {
        int first = -1;
        double rank_sum = 0;
        int found = 0;
        for (const auto& file : bug.faulty_files) {
            int r = bug.ranking.rank_of(file);
            if (r < 0) continue;
            ++found;
            rank_sum += r;
            if (first < 0 || r < first) first = r;
        }
        if (found == 0) throw MissingGroundTruth(bug.bug_id);
        for (int n : ns)
            if (first <= n) ++m.top_n[n];
        mfr_sum += first;
        mar_sum += rank_sum / found;
    }
    if (!bugs.empty()) {
        m.mfr = mfr_sum / static_cast<double>(bugs.size());
        m.mar = mar_sum / static_cast<double>(bugs.size());
    }
    return m;
}

std::string ranking_to_text(const FileRanking& ranking) {
    std::ostringstream os;
    os << "rank  score         file\n";
    for (const auto& e : ranking.entries) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%-5d %-13.10f %s\n", e.rank, e.score, e.file.c_str());
        os << buf;
    }
    return os.str();
}

std::string ranking_to_json(const FileRanking& ranking) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : ranking.entries)
        arr.push_back({{"file", e.file}, {"score", e.score}, {"rank", e.rank}});
    return arr.dump(2);
}

}  // namespace cbi
