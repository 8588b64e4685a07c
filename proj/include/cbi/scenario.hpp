#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbi/ast.hpp"
#include "cbi/harness.hpp"

namespace cbi {

// Desk-scale stand-in for a buggy compiler build: synthetic source files,
// a designated faulty file, a base coverage set, and feature rules that
// flip classification and adjust coverage when a candidate exhibits a
// mutation feature. The first matching rule wins; a candidate matching no
// rule stays failing with the base coverage.
struct ScenarioRule {
    std::string feature;  // added_if | added_loop | added_goto | added_call | text_contains
    std::string param;    // substring for text_contains
    // restricts the statement-kind features (if/loop/goto) to additions
    // whose span falls inside the range
    std::optional<LineSpan> region;
    Classification classification = Classification::Failing;
    std::map<std::string, std::set<int>> drop_lines;
    std::map<std::string, std::set<int>> add_lines;
};

struct Scenario {
    std::vector<std::string> files;
    std::string faulty_file;
    CoverageSpectrum base_coverage;
    // statement-kind counts of the original failing program: if, loop, goto, call
    std::map<std::string, int> baseline;
    std::vector<ScenarioRule> rules;

    static Scenario load_file(const std::string& path);
    static Scenario load_json(const std::string& json_text);
};

struct ProgramFeatures {
    int if_count = 0;
    int loop_count = 0;
    int goto_count = 0;
    int call_count = 0;
};
ProgramFeatures count_features(const Ast& ast);

std::pair<Classification, CoverageSpectrum> simulate(const SourceProgram& program,
                                                     const Scenario& scenario);

class SimulatedBackend final : public Backend {
public:
    explicit SimulatedBackend(Scenario scenario) : scenario_(std::move(scenario)) {}
    std::pair<Classification, CoverageSpectrum> evaluate(const SourceProgram& program) override {
        return simulate(program, scenario_);
    }
    const Scenario& scenario() const { return scenario_; }

private:
    Scenario scenario_;
};

}  // namespace cbi
