#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace cbi {

// Compiler statements covered while compiling one test program:
// file path -> covered line numbers.
struct CoverageSpectrum {
    std::map<std::string, std::set<int>> files;

    size_t size() const {
        size_t n = 0;
        for (const auto& [f, lines] : files) n += lines.size();
        return n;
    }
    bool empty() const { return size() == 0; }
    bool covers(const std::string& file, int line) const {
        auto it = files.find(file);
        return it != files.end() && it->second.count(line) > 0;
    }
    void add(const std::string& file, int line) { files[file].insert(line); }
    void merge(const CoverageSpectrum& other) {
        for (const auto& [f, lines] : other.files) files[f].insert(lines.begin(), lines.end());
    }
    bool operator==(const CoverageSpectrum&) const = default;
};

struct SpectrumSet {
    CoverageSpectrum failing;
    std::vector<CoverageSpectrum> passing;
};

struct QualityState {
    double q = 0;
    double sim = 0;
    double div = 0;
    int n = 0;
    double alpha = 0.5;
};

// Jaccard distance over flattened (file, line) pairs; two empty spectra
// have distance zero.
double jaccard_dist(const CoverageSpectrum& a, const CoverageSpectrum& b);

// Mean closeness of each passing spectrum to the failing one.
double similarity(const SpectrumSet& set);

// Mean pairwise distance over the passing set; a singleton has diversity 0.
double diversity(const SpectrumSet& set);

// q = n * (alpha * div + (1 - alpha) * sim)
QualityState quality(const SpectrumSet& set, double alpha);

double delta_quality(const QualityState& current, const QualityState& previous);

}  // namespace cbi
