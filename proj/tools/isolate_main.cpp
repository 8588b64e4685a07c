#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbi/ast_print.hpp"
#include "cbi/complexity.hpp"
#include "cbi/errors.hpp"
#include "cbi/orchestrator.hpp"
#include "cbi/parser.hpp"
#include "cbi/prompt.hpp"

namespace {

cbi::SourceProgram load_program(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cbi::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return cbi::SourceProgram::from_text(path, ss.str());
}

void apply_overrides(cbi::RunConfig& config, const std::string& backend, double budget,
                     int target, const std::string& out, std::uint64_t seed, bool seed_given) {
    if (!backend.empty()) config.backend = backend;
    if (budget > 0) config.termination.budget_s = budget;
    if (target > 0) config.termination.target_passing = target;
    if (!out.empty()) config.out_dir = out;
    if (seed_given) {
        config.seed = seed;
        config.seed_set = true;
    }
}

int cmd_analyze(const std::string& path) {
    cbi::SourceProgram program = load_program(path);
    cbi::Ast ast = cbi::parse(program);
    cbi::DefUseTable table = cbi::def_use(ast);
    cbi::VariableRanking ranking = cbi::rank_variables(table);

    std::printf("variables (score = defs + uses):\n");
    std::printf("  %-16s %5s %5s %5s  line\n", "name", "score", "defs", "uses");
    for (const auto& e : ranking.entries) {
        const auto& c = table.at(e.name);
        std::printf("  %-16s %5d %5d %5d  %d\n", e.name.c_str(), e.score, c.n_def, c.n_use,
                    e.declaring_line);
    }

    std::printf("\nstatement regions (score = nesting cyclomatic count):\n");
    std::vector<cbi::StatementComplexityMap> maps;
    for (const auto& fn : ast.functions) {
        maps.push_back(cbi::statement_complexity(cbi::build_cfg(ast, fn.name), ast));
        const auto& map = maps.back();
        std::printf("  %s:\n", fn.name.c_str());
        for (const auto& e : map.entries)
            std::printf("    lines %3d-%-3d score %d\n", e.span.start, e.span.end, e.score);
        if (!map.oracle_lines.empty()) {
            std::printf("    oracle lines:");
            for (int l : map.oracle_lines) std::printf(" %d", l);
            std::printf("\n");
        }
    }

    cbi::MutationTarget target = cbi::select_mutation_target(ast);
    std::printf("\nselected variables:");
    for (const auto& v : target.variables) std::printf(" %s", v.c_str());
    std::printf("\nselected location: lines %d-%d\n", target.start_line, target.end_line);
    return 0;
}

// Benchmark evaluation: a manifest of per-bug reports and ground-truth
// files (one faulty path per line) yields Top-N / MFR / MAR.
int cmd_eval(const std::string& manifest_path) {
    nlohmann::json manifest = nlohmann::json::parse(load_program(manifest_path).text);
    std::string base = std::filesystem::path(manifest_path).parent_path().string();
    auto resolve = [&](const std::string& p) {
        if (p.empty() || std::filesystem::path(p).is_absolute() || base.empty()) return p;
        return (std::filesystem::path(base) / p).string();
    };
    std::vector<cbi::BugResult> bugs;
    for (const auto& entry : manifest.at("bugs")) {
        cbi::BugResult bug;
        bug.bug_id = entry.at("bug_id").get<std::string>();
        nlohmann::json report =
            nlohmann::json::parse(load_program(resolve(entry.at("report").get<std::string>())).text);
        for (const auto& r : report.at("ranking"))
            bug.ranking.entries.push_back({r.at("file").get<std::string>(),
                                           r.at("score").get<double>(), r.at("rank").get<int>()});
        std::istringstream truth(load_program(resolve(entry.at("truth").get<std::string>())).text);
        std::string line;
        while (std::getline(truth, line))
            if (!line.empty()) bug.faulty_files.push_back(line);
        bugs.push_back(std::move(bug));
    }
    cbi::EvalMetrics m = cbi::eval_metrics(bugs);
    std::printf("bugs: %zu\n", bugs.size());
    for (const auto& [n, count] : m.top_n) std::printf("Top-%-2d %d\n", n, count);
    std::printf("MFR   %.4f\nMAR   %.4f\n", m.mfr, m.mar);
    return 0;
}

int cmd_prompts() {
    std::printf("template version: %s\n\n", cbi::kPromptTemplateVersion);
    std::printf("mutation pattern:\n%s\n", cbi::mutation_prompt_template().c_str());
    std::printf("feedback (undefined behavior):\n%s\n", cbi::ub_feedback_template().c_str());
    std::printf("feedback (oracle):\n%s\n", cbi::oracle_feedback_template().c_str());
    std::printf("mutation rules:\n");
    for (const auto& rule : cbi::rule_catalog())
        std::printf("  %2d  %s\n", rule.id, rule.description.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compiler-bug isolation via witness-program generation"};
    app.require_subcommand(0, 1);

    std::string config_path, backend, out_dir;
    double budget = 0;
    int target = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "run configuration (JSON)");
    app.add_option("--seed", seed, "override the run seed")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--backend", backend, "backend override: real | sim")
        ->check(CLI::IsMember({"real", "sim"}));
    app.add_option("--budget", budget, "wall-clock budget seconds");
    app.add_option("--target", target, "accepted witness-program target");
    app.add_option("--out", out_dir, "output directory");

    auto* replay_cmd = app.add_subcommand("replay", "re-run a logged mock-gateway run and verify it");
    std::string replay_log, replay_config_path, replay_out;
    replay_cmd->add_option("--log", replay_log, "runlog.ndjson from the original run")->required();
    replay_cmd->add_option("--config", replay_config_path, "the original configuration")->required();
    replay_cmd->add_option("--out", replay_out, "output directory");

    auto* analyze_cmd = app.add_subcommand("analyze", "print variable and region complexity");
    std::string analyze_path;
    analyze_cmd->add_option("file", analyze_path, "C source file")->required();

    auto* dump_cmd = app.add_subcommand("ast-dump", "dump the parsed AST as JSON");
    std::string dump_path;
    dump_cmd->add_option("file", dump_path, "C source file")->required();

    auto* prompts_cmd = app.add_subcommand("prompts", "print the versioned prompt templates");

    auto* eval_cmd = app.add_subcommand("eval", "compute Top-N/MFR/MAR over a bug manifest");
    std::string eval_manifest;
    eval_cmd->add_option("manifest", eval_manifest, "JSON manifest of reports and ground truth")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*replay_cmd) {
            cbi::RunConfig config = cbi::RunConfig::load_file(replay_config_path);
            if (!replay_out.empty()) config.out_dir = replay_out;
            cbi::IsolationReport report = cbi::replay(replay_log, config);
            std::fputs(report.to_text().c_str(), stdout);
            return 0;
        }
        if (*analyze_cmd) return cmd_analyze(analyze_path);
        if (*dump_cmd) {
            std::fputs(cbi::ast_to_json(cbi::parse(load_program(dump_path))).c_str(), stdout);
            std::fputs("\n", stdout);
            return 0;
        }
        if (*prompts_cmd) return cmd_prompts();
        if (*eval_cmd) return cmd_eval(eval_manifest);

        if (config_path.empty()) {
            std::fputs(app.help().c_str(), stderr);
            return 1;
        }
        cbi::RunConfig config = cbi::RunConfig::load_file(config_path);
        apply_overrides(config, backend, budget, target, out_dir, seed, seed_given);
        cbi::IsolationReport report = cbi::run(config);
        std::fputs(report.to_text().c_str(), stdout);
        std::fprintf(stdout, "\nreport written to %s\n", config.out_dir.c_str());
        return 0;
    } catch (const cbi::SetupError& e) {
        std::fprintf(stderr, "setup error: %s\n", e.what());
        return 2;
    } catch (const cbi::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
