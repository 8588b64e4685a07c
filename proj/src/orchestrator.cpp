#include "cbi/orchestrator.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cbi/complexity.hpp"
#include "cbi/errors.hpp"
#include "cbi/hash.hpp"
#include "cbi/parser.hpp"
#include "cbi/prompt.hpp"
#include "cbi/scenario.hpp"
#include "cbi/spectra.hpp"
#include "cbi/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cbi {

namespace {

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

// --- configuration ------------------------------------------------------------

RunConfig RunConfig::load_json(const json& j, const std::string& base_dir) {
    RunConfig c;
    c.bug_id = j.value("bug_id", "bug");
    if (!j.contains("failing_program")) throw Error("config requires failing_program");
    c.failing_program_path = resolve_path(j.at("failing_program").get<std::string>(), base_dir);
    c.oracle = oracle_kind_from_string(j.value("oracle", "wrong_code"));
    c.backend = j.value("backend", "sim");
    if (c.backend != "sim" && c.backend != "real")
        throw Error("backend must be 'sim' or 'real'");
    c.scenario_path = resolve_path(j.value("scenario", ""), base_dir);
    if (j.contains("compiler")) {
        const json& cj = j.at("compiler");
        c.compiler.compiler = cj.value("path", "");
        if (cj.contains("option_sets"))
            c.compiler.option_sets = cj.at("option_sets").get<std::vector<std::vector<std::string>>>();
        c.compiler.coverage_enabled = cj.value("coverage_enabled", false);
        c.compiler.working_dir = resolve_path(cj.value("working_dir", ""), base_dir);
        c.compiler.coverage_reset_command = cj.value("coverage_reset_command", "");
        c.compiler.coverage_command = cj.value("coverage_command", "");
        c.compiler.reports_dir = resolve_path(cj.value("reports_dir", ""), base_dir);
        c.compiler.compile_timeout_s = cj.value("compile_timeout_s", 60.0);
        c.compiler.run_timeout_s = cj.value("run_timeout_s", 10.0);
    }
    if (j.contains("llm")) {
        const json& lj = j.at("llm");
        c.llm.endpoint = lj.value("endpoint", c.llm.endpoint);
        c.llm.model = lj.value("model", c.llm.model);
        c.llm.temperature = lj.value("temperature", 1.0);
        c.llm.timeout_s = lj.value("timeout_s", 60.0);
        c.llm.max_retries = lj.value("max_retries", 2);
        c.llm.max_tokens = lj.value("max_tokens", 4096);
        c.llm.api_key_env = lj.value("api_key_env", c.llm.api_key_env);
        c.mock_fixtures_dir = resolve_path(lj.value("mock_fixtures", ""), base_dir);
    }
    c.analyzer_command = j.value("analyzer", "");
    c.alpha = j.value("alpha", 0.5);
    if (c.alpha < 0 || c.alpha > 1) throw Error("alpha must lie in [0, 1]");
    if (j.contains("rl")) {
        const json& rj = j.at("rl");
        c.rl.gamma = rj.value("gamma", 0.9);
        c.rl.beta = rj.value("beta", 0.01);
        c.rl.lookahead = rj.value("lookahead", 5);
        c.rl.hidden = rj.value("hidden", 32);
    }
    if (j.contains("termination")) {
        const json& tj = j.at("termination");
        c.termination.budget_s = tj.value("budget_s", 3600.0);
        c.termination.target_passing = tj.value("target_passing", 10);
    }
    if (c.termination.budget_s <= 0 && c.termination.target_passing <= 0)
        throw Error("config needs at least one termination condition");
    c.max_steps = j.value("max_steps", 200);
    c.variables_top_k = j.value("variables_top_k", 3);
    c.history_cap = j.value("history_cap", 6);
    if (j.contains("seed")) {
        c.seed = j.at("seed").get<std::uint64_t>();
        c.seed_set = true;
    }
    c.out_dir = resolve_path(j.value("out_dir", "cbi-out"), base_dir);
    return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error("config is not valid JSON: " + std::string(e.what()));
    }
    return load_json(j, fs::path(path).parent_path().string());
}

json RunConfig::canonical_json() const {
    json j;
    j["bug_id"] = bug_id;
    j["failing_program"] = failing_program_path;
    j["oracle"] = to_string(oracle);
    j["backend"] = backend;
    j["scenario"] = scenario_path;
    j["compiler"] = {{"path", compiler.compiler},
                     {"option_sets", compiler.option_sets},
                     {"coverage_enabled", compiler.coverage_enabled}};
    j["llm"] = {{"endpoint", llm.endpoint},
                {"model", llm.model},
                {"temperature", llm.temperature},
                {"max_tokens", llm.max_tokens},
                {"mock_fixtures", mock_fixtures_dir}};
    j["analyzer"] = analyzer_command;
    j["alpha"] = alpha;
    j["rl"] = {{"gamma", rl.gamma},
               {"beta", rl.beta},
               {"lookahead", rl.lookahead},
               {"hidden", rl.hidden}};
    j["termination"] = {{"budget_s", termination.budget_s},
                        {"target_passing", termination.target_passing}};
    j["max_steps"] = max_steps;
    j["history_cap"] = history_cap;
    j["variables_top_k"] = variables_top_k;
    return j;
}

std::string RunConfig::config_hash() const {
    return fnv1a64_hex(canonical_json().dump());
}

// --- run log -------------------------------------------------------------------

json RunLogRecord::to_json() const {
    return json{{"t", t},
                {"rule", rule},
                {"prompt_hash", prompt_hash},
                {"reply_hash", reply_hash},
                {"verdict", verdict},
                {"classification", classification},
                {"dq", dq},
                {"reward", reward},
                {"q", q},
                {"accepted", accepted},
                {"elapsed_s", elapsed_s}};
}

RunLogRecord RunLogRecord::from_json(const json& j) {
    RunLogRecord r;
    r.t = j.at("t").get<int>();
    r.rule = j.at("rule").get<int>();
    r.prompt_hash = j.at("prompt_hash").get<std::string>();
    r.reply_hash = j.at("reply_hash").get<std::string>();
    r.verdict = j.at("verdict").get<std::string>();
    r.classification = j.at("classification").get<std::string>();
    r.dq = j.at("dq").get<double>();
    r.reward = j.at("reward").get<double>();
    r.q = j.at("q").get<double>();
    r.accepted = j.at("accepted").get<bool>();
    r.elapsed_s = j.value("elapsed_s", 0.0);
    return r;
}

bool RunLogRecord::same_outcome(const RunLogRecord& other) const {
    return t == other.t && rule == other.rule && prompt_hash == other.prompt_hash &&
           reply_hash == other.reply_hash && verdict == other.verdict &&
           classification == other.classification && dq == other.dq &&
           reward == other.reward && q == other.q && accepted == other.accepted;
}

// --- report --------------------------------------------------------------------

std::string IsolationReport::to_json() const {
    json j;
    j["bug_id"] = bug_id;
    j["seed"] = seed;
    j["config"] = config_echo;
    json ranking_json = json::array();
    for (const auto& e : ranking.entries)
        ranking_json.push_back({{"file", e.file}, {"score", e.score}, {"rank", e.rank}});
    j["ranking"] = std::move(ranking_json);
    j["summary"] = {{"steps", summary.steps},
                    {"queries", summary.queries},
                    {"unparseable", summary.unparseable},
                    {"semantic_invalid", summary.semantic_invalid},
                    {"oracle_invalid", summary.oracle_invalid},
                    {"valid", summary.valid},
                    {"passing", summary.passing},
                    {"failing", summary.failing},
                    {"discarded", summary.discarded},
                    {"accepted", summary.accepted},
                    {"end_reason", summary.end_reason}};
    return j.dump(2) + "\n";
}

std::string IsolationReport::to_text() const {
    std::ostringstream os;
    os << "bug: " << bug_id << "\n";
    os << "seed: " << seed << "\n";
    os << "steps: " << summary.steps << "  queries: " << summary.queries
       << "  accepted: " << summary.accepted << "\n";
    os << "valid: " << summary.valid << "  passing: " << summary.passing
       << "  failing: " << summary.failing << "  discarded: " << summary.discarded << "\n";
    os << "rejected: " << summary.semantic_invalid << " semantic, " << summary.oracle_invalid
       << " oracle, " << summary.unparseable << " unparseable\n";
    os << "end: " << summary.end_reason << "\n\n";
    os << ranking_to_text(ranking);
    return os.str();
}

// --- backends and gateways ------------------------------------------------------

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
    if (config.backend == "sim") {
        if (config.scenario_path.empty()) throw SetupError("sim backend requires a scenario");
        return std::make_unique<SimulatedBackend>(Scenario::load_file(config.scenario_path));
    }
    if (config.compiler.compiler.empty() || config.compiler.option_sets.empty())
        throw SetupError("real backend requires a compiler path and option sets");
    return std::make_unique<RealBackend>(config.compiler, config.oracle);
}

std::unique_ptr<LlmGateway> make_gateway(const RunConfig& config) {
    if (!config.mock_fixtures_dir.empty())
        return std::make_unique<MockGateway>(config.mock_fixtures_dir);
    return std::make_unique<HttpGateway>();
}

// --- the loop --------------------------------------------------------------------

namespace {

class RunLogWriter {
public:
    RunLogWriter(const fs::path& path, const json& header) : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot write run log: " + path.string());
        out_ << header.dump() << "\n";
        out_.flush();
    }
    void record(const json& j) {
        out_ << j.dump() << "\n";
        out_.flush();
    }

private:
    std::ofstream out_;
};

struct StepContext {
    int t;
    double elapsed_s;
};

}  // namespace

IsolationReport run_with(const RunConfig& config, LlmGateway& gateway, Backend& backend,
                         const std::vector<RunLogRecord>* expected_records,
                         std::optional<int> forced_step_limit) {
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    // setup: the failing program must parse and fail under the backend
    SourceProgram failing;
    Ast failing_ast;
    try {
        failing = SourceProgram::from_text(config.bug_id.empty() ? "failing" : config.bug_id,
                                           read_text_file(config.failing_program_path));
        failing_ast = parse(failing);
    } catch (const Error& e) {
        throw SetupError(std::string("failing program unusable: ") + e.what());
    }
    auto [failing_cls, failing_spectrum] = backend.evaluate(failing);
    if (failing_cls != Classification::Failing)
        throw SetupError("failing program does not fail under the backend (got " +
                         std::string(to_string(failing_cls)) + ")");
    if (failing_spectrum.empty())
        throw SetupError("failing program produced an empty spectrum");

    MutationTarget target = select_mutation_target(failing_ast, config.variables_top_k);

    std::uint64_t seed = config.seed;
    if (!config.seed_set) seed = std::random_device{}();
    Hyperparams hp = config.rl;
    hp.seed = seed;
    const int n_rules = static_cast<int>(rule_catalog().size());
    A2cAgent agent(4 + 2 * n_rules, n_rules, hp);

    fs::create_directories(config.out_dir);
    json header{{"type", "header"},
                {"config_hash", config.config_hash()},
                {"seed", seed},
                {"bug_id", config.bug_id},
                {"template_version", kPromptTemplateVersion}};
    RunLogWriter log(fs::path(config.out_dir) / "runlog.ndjson", header);

    SpectrumSet accepted_set;
    accepted_set.failing = failing_spectrum;
    QualityState q_current;
    q_current.alpha = config.alpha;

    Conversation conversation;
    std::optional<FeedbackPrompt> pending_feedback;
    RunSummary summary;
    std::vector<RunLogRecord> records;
    int last_rule = 0;
    std::string end_reason;

    const int step_limit = forced_step_limit.value_or(config.max_steps);

    for (int t = 1;; ++t) {
        if (config.termination.target_passing > 0 &&
            summary.accepted >= config.termination.target_passing) {
            end_reason = "target_reached";
            break;
        }
        if (t > step_limit) {
            end_reason = forced_step_limit ? "log_exhausted" : "step_cap";
            break;
        }
        if (config.termination.budget_s > 0 && elapsed() >= config.termination.budget_s) {
            end_reason = "budget_expired";
            break;
        }

        AgentState state = build_agent_state(t, config.max_steps, q_current.sim, q_current.div,
                                             summary.accepted, config.termination.target_passing,
                                             last_rule, agent.ledger());
        int rule_id = agent.select_action(state);

        PromptInstance prompt = render_prompt(rule_by_id(rule_id), target, failing);
        std::string user_msg = prompt.rendered;
        if (pending_feedback) {
            user_msg = pending_feedback->rendered + "\n" + prompt.rendered;
            pending_feedback.reset();
        }
        conversation.add_user(user_msg);
        conversation.truncate(static_cast<size_t>(config.history_cap));

        RunLogRecord rec;
        rec.t = t;
        rec.rule = rule_id;
        rec.prompt_hash = fnv1a64_hex(user_msg);

        LlmReply reply;
        try {
            reply = gateway.complete(conversation, config.llm);
        } catch (const Error& e) {
            log.record(json{{"type", "end"},
                            {"reason", "fatal_gateway_error"},
                            {"detail", e.what()},
                            {"t", t}});
            throw;
        }
        conversation.add_assistant(reply.text);
        ++summary.queries;
        rec.reply_hash = fnv1a64_hex(reply.text);

        double dq = 0;
        std::optional<SourceProgram> candidate = extract_program(reply);
        if (!candidate) {
            rec.verdict = "unparseable";
            rec.classification = "none";
            ++summary.unparseable;
        } else {
            candidate->id = "cand-" + std::to_string(t);
            ValidationReport vr = semantic_validate(*candidate, config.analyzer_command);
            if (vr.valid()) vr = oracle_validate(*candidate, failing);
            if (!vr.valid()) {
                pending_feedback = render_feedback(vr);
                rec.verdict =
                    vr.verdict == Verdict::SemanticInvalid ? "semantic_invalid" : "oracle_invalid";
                rec.classification = "none";
                if (vr.verdict == Verdict::SemanticInvalid)
                    ++summary.semantic_invalid;
                else
                    ++summary.oracle_invalid;
            } else {
                rec.verdict = "valid";
                ++summary.valid;
                auto [cls, spectrum] = backend.evaluate(*candidate);
                rec.classification = to_string(cls);
                switch (cls) {
                    case Classification::Passing: {
                        ++summary.passing;
                        SpectrumSet tentative = accepted_set;
                        tentative.passing.push_back(spectrum);
                        QualityState q_new = quality(tentative, config.alpha);
                        double gain = delta_quality(q_new, q_current);
                        if (gain > 0) {
                            dq = gain;
                            accepted_set.passing.push_back(std::move(spectrum));
                            q_current = q_new;
                            rec.accepted = true;
                            ++summary.accepted;
                        }
                        break;
                    }
                    case Classification::Failing:
                        ++summary.failing;
                        break;
                    case Classification::Discard:
                        ++summary.discarded;
                        break;
                }
            }
        }

        agent.ledger().record(rule_id, dq);
        double reward = agent.ledger().actual_reward(rule_id);
        agent.observe(state, rule_id, reward);

        rec.dq = dq;
        rec.reward = reward;
        rec.q = q_current.q;
        rec.elapsed_s = elapsed();
        ++summary.steps;
        last_rule = rule_id;

        if (expected_records) {
            if (static_cast<size_t>(t) > expected_records->size())
                throw LogMismatch("replay produced more steps than the log holds");
            const RunLogRecord& want = (*expected_records)[static_cast<size_t>(t) - 1];
            if (!rec.same_outcome(want))
                throw LogMismatch("step " + std::to_string(t) + " diverges from the log: got " +
                                  rec.to_json().dump() + ", want " + want.to_json().dump());
        }
        log.record(rec.to_json());
        records.push_back(std::move(rec));
    }
    agent.finish_episode();
    log.record(json{{"type", "end"}, {"reason", end_reason}});

    if (expected_records && records.size() != expected_records->size())
        throw LogMismatch("replay produced fewer steps than the log holds");

    IsolationReport report;
    report.bug_id = config.bug_id;
    report.seed = seed;
    report.config_echo = config.canonical_json();
    report.summary = summary;
    report.summary.end_reason = end_reason;
    report.ranking = rank_files(score_files(accepted_set));

    std::ofstream(fs::path(config.out_dir) / "report.json", std::ios::binary) << report.to_json();
    std::ofstream(fs::path(config.out_dir) / "report.txt", std::ios::binary) << report.to_text();
    {
        std::ofstream agent_out(fs::path(config.out_dir) / "agent.ckpt", std::ios::binary);
        agent.save(agent_out);
    }
    return report;
}

IsolationReport run(const RunConfig& config) {
    auto backend = make_backend(config);
    auto gateway = make_gateway(config);
    return run_with(config, *gateway, *backend);
}

IsolationReport replay(const std::string& runlog_path, const RunConfig& config) {
    std::ifstream in(runlog_path, std::ios::binary);
    if (!in) throw Error("cannot open run log: " + runlog_path);
    std::string line;
    if (!std::getline(in, line)) throw LogMismatch("run log is empty");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception&) {
        throw LogMismatch("run log header is not JSON");
    }
    if (header.value("type", "") != "header") throw LogMismatch("run log lacks a header record");
    if (header.value("config_hash", "") != config.config_hash())
        throw LogMismatch("config hash mismatch: the log was produced by a different configuration");
    if (config.mock_fixtures_dir.empty())
        throw Error("replay requires the mock gateway (set llm.mock_fixtures)");

    std::vector<RunLogRecord> expected;
    std::string logged_end;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            throw LogMismatch("corrupt run log line: " + line);
        }
        if (j.contains("type")) {
            if (j.at("type") == "end") logged_end = j.value("reason", "");
            continue;
        }
        expected.push_back(RunLogRecord::from_json(j));
    }

    RunConfig replay_config = config;
    replay_config.seed = header.at("seed").get<std::uint64_t>();
    replay_config.seed_set = true;
    replay_config.out_dir = config.out_dir + "/replay";

    auto backend = make_backend(replay_config);
    auto gateway = make_gateway(replay_config);
    return run_with(replay_config, *gateway, *backend, &expected,
                    static_cast<int>(expected.size()));
}

}  // namespace cbi
