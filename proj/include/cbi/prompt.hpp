#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbi/complexity.hpp"
#include "cbi/source_program.hpp"
#include "cbi/validation.hpp"

namespace cbi {

struct MutationRule {
    int id = 0;  // 1..13
    std::string description;
};

struct PromptInstance {
    MutationRule rule;
    std::vector<std::string> variables;
    int start_line = 0;
    int end_line = 0;
    std::string program_text;
    std::string rendered;
};

struct FeedbackPrompt {
    std::string cause;  // UB category id or "oracle"
    std::string rendered;
};

// Template wording is versioned; the copies under resources/prompts/ are
// the audit trail and must stay byte-identical to the embedded strings.
extern const char* const kPromptTemplateVersion;
const std::string& mutation_prompt_template();
const std::string& ub_feedback_template();
const std::string& oracle_feedback_template();

// The fixed 13-rule catalog, ids 1..13.
const std::vector<MutationRule>& rule_catalog();
const MutationRule& rule_by_id(int id);

PromptInstance render_prompt(const MutationRule& rule, const MutationTarget& target,
                             const SourceProgram& program);

// Recovers (rule id, variables, line range) from a rendered prompt;
// nullopt when the text does not match the pattern.
struct ParsedPrompt {
    int rule_id;
    std::vector<std::string> variables;
    int start_line;
    int end_line;
};
std::optional<ParsedPrompt> parse_prompt(const std::string& rendered);

// Feedback for an invalid candidate; throws NoFailure on a valid report.
FeedbackPrompt render_feedback(const ValidationReport& report);

}  // namespace cbi
