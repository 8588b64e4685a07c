#include "cbi/prompt.hpp"

#include <sstream>

#include "cbi/errors.hpp"

namespace cbi {

const char* const kPromptTemplateVersion = "v1";

namespace {

const std::string kMutationTemplate =
    "Please generate a variant program P of the input program F by {rule} and reusing the "
    "variables in the list {variables} between lines {start}-{end}.\n"
    "\n"
    "```c\n"
    "{program}"
    "```\n";

const std::string kUbFeedbackTemplate =
    "The above program contains a kind of undefined behavior {category}, please do not "
    "generate such test programs again.\n";

const std::string kOracleFeedbackTemplate =
    "The above program does not preserve the test oracle of the original program: expected "
    "{expected_printf} printf and {expected_abort} abort statements, found {found_printf} "
    "printf and {found_abort} abort. Please keep the printf and abort statements of the "
    "original failing program unchanged.\n";

std::string replace_all(std::string text, const std::string& slot, const std::string& value) {
    size_t pos;
    while ((pos = text.find(slot)) != std::string::npos)
        text.replace(pos, slot.size(), value);
    return text;
}

std::string variable_list(const std::vector<std::string>& names) {
    std::string out = "{";
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    out += "}";
    return out;
}

}  // namespace

const std::string& mutation_prompt_template() { return kMutationTemplate; }
const std::string& ub_feedback_template() { return kUbFeedbackTemplate; }
const std::string& oracle_feedback_template() { return kOracleFeedbackTemplate; }

const std::vector<MutationRule>& rule_catalog() {
    static const std::vector<MutationRule> catalog = {
        {1, "inserting an if statement"},
        {2, "inserting a loop (i.e., while or for) statement"},
        {3, "inserting a function call"},
        {4, "inserting a goto statement"},
        {5, "inserting a qualifier (i.e., volatile, const, and restrict)"},
        {6, "removing a qualifier (i.e., volatile, const, and restrict)"},
        {7, "inserting a modifier (i.e., long, short, signed, and unsigned)"},
        {8, "removing a modifier (i.e., long, short, signed, and unsigned)"},
        {9, "replacing a constant with another valid one"},
        {10, "replacing a binary operator with another valid one"},
        {11, "removing a unary operator on the variables"},
        {12, "replacing a unary operator on the variables"},
        {13, "replacing a variable with another valid one"},
    };
    return catalog;
}

const MutationRule& rule_by_id(int id) {
    const auto& catalog = rule_catalog();
    if (id < 1 || id > static_cast<int>(catalog.size()))
        throw Error("mutation rule id out of range: " + std::to_string(id));
    return catalog[static_cast<size_t>(id - 1)];
}

PromptInstance render_prompt(const MutationRule& rule, const MutationTarget& target,
                             const SourceProgram& program) {
    PromptInstance p;
    p.rule = rule;
    p.variables = target.variables;
    p.start_line = target.start_line;
    p.end_line = target.end_line;
    p.program_text = program.text;

    std::string program_block = program.text;
    if (program_block.empty() || program_block.back() != '\n') program_block += '\n';

    std::string text = kMutationTemplate;
    text = replace_all(text, "{rule}", rule.description);
    text = replace_all(text, "{variables}", variable_list(target.variables));
    text = replace_all(text, "{start}", std::to_string(target.start_line));
    text = replace_all(text, "{end}", std::to_string(target.end_line));
    text = replace_all(text, "{program}", program_block);
    p.rendered = std::move(text);
    return p;
}

std::optional<ParsedPrompt> parse_prompt(const std::string& rendered) {
    const std::string prefix = "Please generate a variant program P of the input program F by ";
    if (rendered.rfind(prefix, 0) != 0) return std::nullopt;
    const std::string mid = " and reusing the variables in the list {";
    size_t mid_pos = rendered.find(mid, prefix.size());
    if (mid_pos == std::string::npos) return std::nullopt;

    std::string description = rendered.substr(prefix.size(), mid_pos - prefix.size());
    int rule_id = 0;
    for (const auto& r : rule_catalog())
        if (r.description == description) rule_id = r.id;
    if (rule_id == 0) return std::nullopt;

    size_t vars_start = mid_pos + mid.size();
    size_t vars_end = rendered.find('}', vars_start);
    if (vars_end == std::string::npos) return std::nullopt;
    ParsedPrompt out;
    out.rule_id = rule_id;
    std::string vars = rendered.substr(vars_start, vars_end - vars_start);
    std::istringstream vs(vars);
    std::string name;
    while (std::getline(vs, name, ',')) {
        size_t b = name.find_first_not_of(' ');
        size_t e = name.find_last_not_of(' ');
        if (b == std::string::npos) return std::nullopt;
        out.variables.push_back(name.substr(b, e - b + 1));
    }
    if (out.variables.empty()) return std::nullopt;

    const std::string lines_kw = " between lines ";
    size_t lines_pos = rendered.find(lines_kw, vars_end);
    if (lines_pos == std::string::npos) return std::nullopt;
    size_t num_start = lines_pos + lines_kw.size();
    size_t dash = rendered.find('-', num_start);
    size_t dot = rendered.find('.', num_start);
    if (dash == std::string::npos || dot == std::string::npos || dot < dash) return std::nullopt;
    try {
        out.start_line = std::stoi(rendered.substr(num_start, dash - num_start));
        out.end_line = std::stoi(rendered.substr(dash + 1, dot - dash - 1));
    } catch (...) {
        return std::nullopt;
    }
    return out;
}

FeedbackPrompt render_feedback(const ValidationReport& report) {
    if (report.valid()) throw NoFailure();
    FeedbackPrompt fb;
    if (report.verdict == Verdict::SemanticInvalid && report.cause) {
        fb.cause = to_string(*report.cause);
        fb.rendered = replace_all(kUbFeedbackTemplate, "{category}", display_name(*report.cause));
        return fb;
    }
    if (report.verdict == Verdict::OracleInvalid && report.oracle) {
        const OracleCounts& c = *report.oracle;
        fb.cause = "oracle";
        std::string text = kOracleFeedbackTemplate;
        text = replace_all(text, "{expected_printf}", std::to_string(c.expected_printf));
        text = replace_all(text, "{expected_abort}", std::to_string(c.expected_abort));
        text = replace_all(text, "{found_printf}", std::to_string(c.found_printf));
        text = replace_all(text, "{found_abort}", std::to_string(c.found_abort));
        fb.rendered = std::move(text);
        return fb;
    }
    throw Error("validation report carries no renderable cause");
}

}  // namespace cbi
