#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbi/source_program.hpp"
#include "cbi/spectra.hpp"

namespace cbi {

enum class OracleKind { Crash, WrongCode };
const char* to_string(OracleKind k);
OracleKind oracle_kind_from_string(const std::string& s);

enum class Classification { Passing, Failing, Discard };
const char* to_string(Classification c);

// How to drive the compiler under test. option_sets[0] is the
// bug-triggering configuration; later sets are the reference
// configurations (for wrong-code bugs, the pair that produced the
// original inconsistency).
struct CompilerSpec {
    std::string compiler;
    std::vector<std::vector<std::string>> option_sets;
    bool coverage_enabled = false;
    std::string working_dir;
    std::string coverage_reset_command;  // zeroes counters before a program
    std::string coverage_command;        // emits line-coverage reports into reports_dir
    std::string reports_dir;
    double compile_timeout_s = 60;
    double run_timeout_s = 10;
};

struct OptionSetOutcome {
    std::vector<std::string> options;
    int compiler_exit = -1;
    bool compiler_signaled = false;
    bool compile_timed_out = false;
    std::string diagnostics;
    bool ran = false;
    int program_exit = -1;
    bool program_signaled = false;
    bool program_timed_out = false;
    std::string program_stdout;
};

struct ExecutionOutcome {
    std::vector<OptionSetOutcome> per_option_set;
    double wall_time_s = 0;

    bool compiler_crashed(size_t set_index) const;
    bool compiled_cleanly(size_t set_index) const;
};

// Crash oracle: failing iff the compiler crashes under the triggering
// options, passing iff every option set compiles cleanly. Wrong-code
// oracle: failing iff the program results differ across the two option
// sets, passing iff they agree. Candidates the compiler rejects, or that
// time out, are discarded.
Classification classify(const ExecutionOutcome& outcome, OracleKind oracle);

// One line-coverage report: "hits:line:text" records, where hits "#####"
// or "-" mean uncovered/non-executable and a line number of 0 carries
// metadata ("Source:<path>" names the file).
CoverageSpectrum parse_coverage_report(const std::string& report_text,
                                       const std::string& fallback_file);

// Every report file in a directory, merged.
CoverageSpectrum parse_coverage_reports_dir(const std::string& dir);

// Real-compiler path: compile (and, for wrong-code, run) the program
// under every option set.
ExecutionOutcome compile_and_run(const SourceProgram& program, const CompilerSpec& spec,
                                 OracleKind oracle);

// Compiles under the instrumented build, runs the report command, and
// ingests the reports. Counters reset first; a directory lock serializes
// concurrent collectors. Throws CoverageUnavailable when no report appears.
CoverageSpectrum collect_coverage(const SourceProgram& program, const CompilerSpec& spec);

// The orchestrator's view of a compiler backend.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::pair<Classification, CoverageSpectrum> evaluate(const SourceProgram& program) = 0;
};

class RealBackend final : public Backend {
public:
    RealBackend(CompilerSpec spec, OracleKind oracle)
        : spec_(std::move(spec)), oracle_(oracle) {}
    std::pair<Classification, CoverageSpectrum> evaluate(const SourceProgram& program) override;

private:
    CompilerSpec spec_;
    OracleKind oracle_;
};

}  // namespace cbi
