#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbi/harness.hpp"
#include "cbi/llm_gateway.hpp"
#include "cbi/rl_agent.hpp"
#include "cbi/sbfl.hpp"

namespace cbi {

struct TerminationConfig {
    double budget_s = 3600;   // wall-clock budget
    int target_passing = 10;  // accepted witness programs
};

struct RunConfig {
    std::string bug_id;
    std::string failing_program_path;
    OracleKind oracle = OracleKind::WrongCode;
    std::string backend = "sim";  // sim | real
    std::string scenario_path;    // sim backend
    CompilerSpec compiler;        // real backend
    ModelConfig llm;
    std::string mock_fixtures_dir;  // non-empty selects the mock gateway
    std::string analyzer_command;
    double alpha = 0.5;
    Hyperparams rl;
    TerminationConfig termination;
    int max_steps = 200;
    int history_cap = 6;    // conversation messages kept
    int variables_top_k = 3;  // Comp-3 width; the Comp-1 small-set rule still applies
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = "cbi-out";

    static RunConfig load_file(const std::string& path);
    static RunConfig load_json(const nlohmann::json& j, const std::string& base_dir);

    // Canonical echo of every semantically relevant field (seed and
    // output directory excluded; the seed travels in the run-log header).
    nlohmann::json canonical_json() const;
    std::string config_hash() const;
};

struct RunLogRecord {
    int t = 0;
    int rule = 0;
    std::string prompt_hash;
    std::string reply_hash;
    std::string verdict;         // valid | semantic_invalid | oracle_invalid | unparseable
    std::string classification;  // passing | failing | discard | none
    double dq = 0;
    double reward = 0;
    double q = 0;
    bool accepted = false;
    double elapsed_s = 0;

    nlohmann::json to_json() const;
    static RunLogRecord from_json(const nlohmann::json& j);
    // Equality over every replay-relevant field (elapsed time excluded).
    bool same_outcome(const RunLogRecord& other) const;
};

struct RunSummary {
    int steps = 0;
    int queries = 0;
    int unparseable = 0;
    int semantic_invalid = 0;
    int oracle_invalid = 0;
    int valid = 0;
    int passing = 0;
    int failing = 0;
    int discarded = 0;
    int accepted = 0;
    std::string end_reason;
};

struct IsolationReport {
    FileRanking ranking;
    RunSummary summary;
    nlohmann::json config_echo;
    std::uint64_t seed = 0;
    std::string bug_id;

    std::string to_json() const;
    std::string to_text() const;
};

// Executes the full mutate-validate-rank loop and writes report.json,
// report.txt, and runlog.ndjson into config.out_dir. Throws SetupError
// when the failing program cannot be parsed or does not fail under the
// backend; gateway failures abort with the partial log preserved.
IsolationReport run(const RunConfig& config);

// Re-executes a mock-gateway run from its log, cross-checking every
// recorded step; throws LogMismatch on the first disagreement and refuses
// logs whose config hash differs.
IsolationReport replay(const std::string& runlog_path, const RunConfig& config);

// Test seam: inject gateway/backend implementations.
IsolationReport run_with(const RunConfig& config, LlmGateway& gateway, Backend& backend,
                         const std::vector<RunLogRecord>* expected_records = nullptr,
                         std::optional<int> forced_step_limit = std::nullopt);

std::unique_ptr<Backend> make_backend(const RunConfig& config);
std::unique_ptr<LlmGateway> make_gateway(const RunConfig& config);

}  // namespace cbi
