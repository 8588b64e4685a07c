#include "cbi/spectra.hpp"

#include <algorithm>

#include "cbi/errors.hpp"

namespace cbi {

namespace {

// |a ∩ b| over flattened (file, line) pairs.
size_t intersection_size(const CoverageSpectrum& a, const CoverageSpectrum& b) {
    size_t n = 0;
    for (const auto& [file, lines] : a.files) {
        auto it = b.files.find(file);
        if (it == b.files.end()) continue;
        const auto& other = it->second;
        for (int line : lines) n += other.count(line);
    }
    return n;
}

}  // namespace

double jaccard_dist(const CoverageSpectrum& a, const CoverageSpectrum& b) {
    size_t inter = intersection_size(a, b);
    size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 0.0;  // both empty: identical
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double similarity(const SpectrumSet& set) {
    if (set.passing.empty()) throw EmptyPassingSet();
    double sum = 0;
    for (const auto& p : set.passing) sum += 1.0 - jaccard_dist(p, set.failing);
    return sum / static_cast<double>(set.passing.size());
}

double diversity(const SpectrumSet& set) {
    const size_t n = set.passing.size();
    if (n == 0) throw EmptyPassingSet();
    if (n == 1) return 0.0;
    double sum = 0;
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            sum += jaccard_dist(set.passing[i], set.passing[j]);
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

QualityState quality(const SpectrumSet& set, double alpha) {
    QualityState q;
    q.alpha = alpha;
    q.n = static_cast<int>(set.passing.size());
    if (q.n == 0) return q;  // Q_0 = 0 before any acceptance
    q.sim = similarity(set);
    q.div = diversity(set);
    q.q = q.n * (alpha * q.div + (1.0 - alpha) * q.sim);
    return q;
}

double delta_quality(const QualityState& current, const QualityState& previous) {
    return current.q - previous.q;
}

}  // namespace cbi
