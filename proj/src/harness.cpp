#include "cbi/harness.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "cbi/errors.hpp"
#include "cbi/process.hpp"

namespace fs = std::filesystem;

namespace cbi {

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::string join_options(const std::vector<std::string>& opts) {
    std::string out;
    for (const auto& o : opts) {
        if (!out.empty()) out += ' ';
        out += shell_quote(o);
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Holds an exclusive flock for the lifetime of the object.
class DirectoryLock {
public:
    explicit DirectoryLock(const fs::path& dir) {
        fs::create_directories(dir);
        fd_ = open((dir / ".cbi-lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0) flock(fd_, LOCK_EX);
    }
    ~DirectoryLock() {
        if (fd_ >= 0) {
            flock(fd_, LOCK_UN);
            close(fd_);
        }
    }

private:
    int fd_ = -1;
};

}  // namespace

const char* to_string(OracleKind k) {
    return k == OracleKind::Crash ? "crash" : "wrong_code";
}

OracleKind oracle_kind_from_string(const std::string& s) {
    if (s == "crash") return OracleKind::Crash;
    if (s == "wrong_code") return OracleKind::WrongCode;
    throw Error("unknown oracle kind: " + s);
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Passing: return "passing";
        case Classification::Failing: return "failing";
        case Classification::Discard: return "discard";
    }
    return "?";
}

bool ExecutionOutcome::compiler_crashed(size_t i) const {
    const auto& o = per_option_set.at(i);
    if (o.compiler_signaled) return true;
    return o.diagnostics.find("internal compiler error") != std::string::npos;
}

bool ExecutionOutcome::compiled_cleanly(size_t i) const {
    const auto& o = per_option_set.at(i);
    return !o.compiler_signaled && !o.compile_timed_out && o.compiler_exit == 0;
}

Classification classify(const ExecutionOutcome& outcome, OracleKind oracle) {
    if (outcome.per_option_set.empty()) throw Error("outcome covers no option sets");
    for (const auto& o : outcome.per_option_set)
        if (o.compile_timed_out) return Classification::Discard;

    if (oracle == OracleKind::Crash) {
        if (outcome.compiler_crashed(0)) return Classification::Failing;
        for (size_t i = 0; i < outcome.per_option_set.size(); ++i)
            if (!outcome.compiled_cleanly(i)) return Classification::Discard;
        return Classification::Passing;
    }

    // wrong-code: both configurations must build and run
    if (outcome.per_option_set.size() < 2) throw Error("wrong-code oracle needs two option sets");
    for (size_t i = 0; i < outcome.per_option_set.size(); ++i)
        if (!outcome.compiled_cleanly(i)) return Classification::Discard;
    for (const auto& o : outcome.per_option_set)
        if (!o.ran || o.program_timed_out) return Classification::Discard;
    const auto& first = outcome.per_option_set[0];
    const auto& second = outcome.per_option_set[1];
    bool consistent = first.program_stdout == second.program_stdout &&
                      first.program_exit == second.program_exit &&
                      first.program_signaled == second.program_signaled;
    return consistent ? Classification::Passing : Classification::Failing;
}

CoverageSpectrum parse_coverage_report(const std::string& text, const std::string& fallback_file) {
    CoverageSpectrum spectrum;
    std::string current_file = fallback_file;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        size_t c1 = line.find(':');
        if (c1 == std::string::npos) continue;
        size_t c2 = line.find(':', c1 + 1);
        if (c2 == std::string::npos) continue;
        std::string hits = trim(line.substr(0, c1));
        std::string lineno_str = trim(line.substr(c1 + 1, c2 - c1 - 1));
        if (hits.empty() || lineno_str.empty()) continue;
        if (!std::all_of(lineno_str.begin(), lineno_str.end(),
                         [](unsigned char ch) { return std::isdigit(ch); }))
            continue;
        int lineno = std::stoi(lineno_str);
        std::string rest = line.substr(c2 + 1);
        if (lineno == 0) {
            const std::string src_tag = "Source:";
            std::string meta = trim(rest);
            if (meta.rfind(src_tag, 0) == 0) current_file = meta.substr(src_tag.size());
            continue;
        }
        if (hits == "#####" || hits == "-" || hits == "=====") continue;
        bool numeric = std::all_of(hits.begin(), hits.end(), [](unsigned char ch) {
            return std::isdigit(ch) || ch == '*';  // gcov marks unexecuted blocks "N*"
        });
        if (!numeric) continue;
        long long count = std::stoll(hits);
        if (count > 0) spectrum.add(current_file, lineno);
    }
    return spectrum;
}

CoverageSpectrum parse_coverage_reports_dir(const std::string& dir) {
    CoverageSpectrum merged;
    if (!fs::exists(dir)) throw CoverageUnavailable("reports directory missing: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw CoverageUnavailable("no coverage reports in " + dir);
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::string fallback = f.filename().string();
        if (fallback.size() > 5 && fallback.ends_with(".gcov"))
            fallback = fallback.substr(0, fallback.size() - 5);
        merged.merge(parse_coverage_report(text, fallback));
    }
    return merged;
}

ExecutionOutcome compile_and_run(const SourceProgram& program, const CompilerSpec& spec,
                                 OracleKind oracle) {
    ExecutionOutcome outcome;
    auto started = std::chrono::steady_clock::now();
    fs::path work = spec.working_dir.empty() ? fs::temp_directory_path() / "cbi-harness"
                                             : fs::path(spec.working_dir);
    fs::create_directories(work);
    fs::path src = work / (program.id.empty() ? "candidate.c" : program.id + ".c");
    {
        std::ofstream out(src);
        out << program.text;
    }
    for (size_t i = 0; i < spec.option_sets.size(); ++i) {
        OptionSetOutcome o;
        o.options = spec.option_sets[i];
        fs::path exe = work / ("a.out." + std::to_string(i));
        std::string cmd = shell_quote(spec.compiler) + " " + join_options(o.options) + " " +
                          shell_quote(src.string()) + " -o " + shell_quote(exe.string());
        ProcessResult compile = run_command(cmd, spec.compile_timeout_s);
        o.compiler_exit = compile.exit_code;
        o.compiler_signaled = compile.signaled;
        o.compile_timed_out = compile.timed_out;
        o.diagnostics = compile.output;
        bool clean = !compile.signaled && !compile.timed_out && compile.exit_code == 0;
        if (clean && oracle == OracleKind::WrongCode) {
            ProcessResult run = run_command(shell_quote(exe.string()), spec.run_timeout_s);
            o.ran = true;
            o.program_exit = run.exit_code;
            o.program_signaled = run.signaled;
            o.program_timed_out = run.timed_out;
            o.program_stdout = run.output;
        }
        outcome.per_option_set.push_back(std::move(o));
    }
    outcome.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return outcome;
}

CoverageSpectrum collect_coverage(const SourceProgram& program, const CompilerSpec& spec) {
    if (!spec.coverage_enabled)
        throw CoverageUnavailable("coverage collection disabled in the compiler spec");
    fs::path work = spec.working_dir.empty() ? fs::temp_directory_path() / "cbi-harness"
                                             : fs::path(spec.working_dir);
    DirectoryLock lock(work);
    fs::path src = work / (program.id.empty() ? "candidate.c" : program.id + ".c");
    {
        std::ofstream out(src);
        out << program.text;
    }
    if (!spec.coverage_reset_command.empty())
        run_command(spec.coverage_reset_command, spec.compile_timeout_s);
    if (!spec.option_sets.empty()) {
        std::string cmd = shell_quote(spec.compiler) + " " + join_options(spec.option_sets[0]) +
                          " " + shell_quote(src.string()) + " -o " +
                          shell_quote((work / "a.out.cov").string());
        run_command(cmd, spec.compile_timeout_s);
    }
    if (!spec.coverage_command.empty())
        run_command(spec.coverage_command, spec.compile_timeout_s);
    return parse_coverage_reports_dir(spec.reports_dir);
}

std::pair<Classification, CoverageSpectrum> RealBackend::evaluate(const SourceProgram& program) {
    ExecutionOutcome outcome = compile_and_run(program, spec_, oracle_);
    Classification cls = classify(outcome, oracle_);
    CoverageSpectrum spectrum;
    if (cls != Classification::Discard) spectrum = collect_coverage(program, spec_);
    return {cls, spectrum};
}

}  // namespace cbi
