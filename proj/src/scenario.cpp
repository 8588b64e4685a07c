#include "cbi/scenario.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "cbi/errors.hpp"
#include "cbi/parser.hpp"

namespace cbi {

namespace {

using nlohmann::json;

const std::set<std::string> kFeatures = {"added_if", "added_loop", "added_goto", "added_call",
                                         "text_contains"};

Classification classification_from_string(const std::string& s) {
    if (s == "passing") return Classification::Passing;
    if (s == "failing") return Classification::Failing;
    if (s == "discard") return Classification::Discard;
    throw ScenarioError("unknown classification: " + s);
}

std::map<std::string, std::set<int>> parse_line_map(const json& j, const std::string& what) {
    std::map<std::string, std::set<int>> out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw ScenarioError(what + " must be an object of file -> line list");
    for (const auto& [file, lines] : j.items()) {
        if (!lines.is_array()) throw ScenarioError(what + " entry for " + file + " must be a list");
        for (const auto& l : lines) {
            int line = l.get<int>();
            if (line <= 0) throw ScenarioError(what + " line numbers must be positive");
            out[file].insert(line);
        }
    }
    return out;
}

// Statements of the rule's kind whose span falls inside the region.
bool has_statement_in_region(const Ast& ast, const std::string& feature, const LineSpan& region) {
    bool found = false;
    for (const auto& fn : ast.functions)
        for_each_stmt(fn, [&](const Stmt& s) {
            bool matches = (feature == "added_if" && s.kind == StmtKind::If) ||
                           (feature == "added_loop" &&
                            (s.kind == StmtKind::For || s.kind == StmtKind::While)) ||
                           (feature == "added_goto" && s.kind == StmtKind::Goto);
            if (matches && region.start <= s.span.start && s.span.end <= region.end) found = true;
        });
    return found;
}

bool rule_matches(const ScenarioRule& rule, const SourceProgram& program, const Ast& ast,
                  const ProgramFeatures& features, const Scenario& scenario) {
    auto baseline_of = [&](const std::string& key) {
        auto it = scenario.baseline.find(key);
        return it == scenario.baseline.end() ? 0 : it->second;
    };
    bool added = false;
    if (rule.feature == "added_if")
        added = features.if_count > baseline_of("if");
    else if (rule.feature == "added_loop")
        added = features.loop_count > baseline_of("loop");
    else if (rule.feature == "added_goto")
        added = features.goto_count > baseline_of("goto");
    else if (rule.feature == "added_call")
        added = features.call_count > baseline_of("call");
    else if (rule.feature == "text_contains")
        return program.text.find(rule.param) != std::string::npos;
    if (!added) return false;
    if (rule.region && rule.feature != "added_call")
        return has_statement_in_region(ast, rule.feature, *rule.region);
    return true;
}

}  // namespace

ProgramFeatures count_features(const Ast& ast) {
    ProgramFeatures f;
    auto count_calls = [&](const Expr& e) {
        if (e.kind == ExprKind::Call) ++f.call_count;
    };
    for (const auto& g : ast.globals) {
        if (g.init) for_each_subexpr(*g.init, count_calls);
        if (g.init_list)
            for (const auto& el : g.init_list->elements) for_each_subexpr(*el, count_calls);
    }
    for (const auto& fn : ast.functions)
        for_each_stmt(fn, [&](const Stmt& s) {
            switch (s.kind) {
                case StmtKind::If: ++f.if_count; break;
                case StmtKind::For:
                case StmtKind::While: ++f.loop_count; break;
                case StmtKind::Goto: ++f.goto_count; break;
                default: break;
            }
            for_each_own_expr(s, count_calls);
        });
    return f;
}

Scenario Scenario::load_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario s;
    try {
        if (!j.contains("files") || !j.contains("faulty_file") || !j.contains("base_coverage") ||
            !j.contains("rules"))
            throw ScenarioError("scenario requires files, faulty_file, base_coverage, rules");
        s.files = j.at("files").get<std::vector<std::string>>();
        s.faulty_file = j.at("faulty_file").get<std::string>();
        for (const auto& [file, lines] : parse_line_map(j.at("base_coverage"), "base_coverage"))
            for (int line : lines) s.base_coverage.add(file, line);
        if (j.contains("baseline"))
            s.baseline = j.at("baseline").get<std::map<std::string, int>>();
        for (const auto& rj : j.at("rules")) {
            ScenarioRule rule;
            rule.feature = rj.at("feature").get<std::string>();
            if (!kFeatures.count(rule.feature))
                throw ScenarioError("unknown feature: " + rule.feature);
            if (rj.contains("param")) rule.param = rj.at("param").get<std::string>();
            if (rule.feature == "text_contains" && rule.param.empty())
                throw ScenarioError("text_contains requires a param");
            if (rj.contains("region")) {
                auto r = rj.at("region").get<std::vector<int>>();
                if (r.size() != 2 || r[0] > r[1])
                    throw ScenarioError("region must be [start, end]");
                rule.region = LineSpan{r[0], r[1]};
            }
            rule.classification =
                classification_from_string(rj.at("classification").get<std::string>());
            rule.drop_lines = parse_line_map(rj.value("drop", json()), "drop");
            rule.add_lines = parse_line_map(rj.value("add", json()), "add");
            s.rules.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed scenario: ") + e.what());
    }

    if (s.files.empty()) throw ScenarioError("scenario lists no files");
    std::set<std::string> known(s.files.begin(), s.files.end());
    if (!known.count(s.faulty_file))
        throw ScenarioError("faulty_file is not in the file list: " + s.faulty_file);
    for (const auto& [file, lines] : s.base_coverage.files)
        if (!known.count(file)) throw ScenarioError("base_coverage names unknown file " + file);
    for (const auto& rule : s.rules) {
        for (const auto& [file, lines] : rule.drop_lines) {
            if (!known.count(file)) throw ScenarioError("rule drops unknown file " + file);
            for (int line : lines)
                if (!s.base_coverage.covers(file, line))
                    throw ScenarioError("rule drops " + file + ":" + std::to_string(line) +
                                        " outside the base coverage");
        }
        for (const auto& [file, lines] : rule.add_lines)
            if (!known.count(file)) throw ScenarioError("rule adds unknown file " + file);
    }
    return s;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_json(text);
}

std::pair<Classification, CoverageSpectrum> simulate(const SourceProgram& program,
                                                     const Scenario& scenario) {
    Ast ast;
    try {
        ast = parse(program);
    } catch (const SyntaxError&) {
        return {Classification::Discard, CoverageSpectrum{}};
    }
    ProgramFeatures features = count_features(ast);
    for (const auto& rule : scenario.rules) {
        if (!rule_matches(rule, program, ast, features, scenario)) continue;
        CoverageSpectrum spectrum = scenario.base_coverage;
        for (const auto& [file, lines] : rule.drop_lines) {
            auto it = spectrum.files.find(file);
            if (it == spectrum.files.end()) continue;
            for (int line : lines) it->second.erase(line);
            if (it->second.empty()) spectrum.files.erase(it);
        }
        for (const auto& [file, lines] : rule.add_lines)
            for (int line : lines) spectrum.add(file, line);
        return {rule.classification, spectrum};
    }
    return {Classification::Failing, scenario.base_coverage};
}

}  // namespace cbi
