#pragma once

// Builds the hash-keyed mock-gateway fixture directory for the scripted
// scenario run: each rule's rendered prompt (plain, and prefixed with the
// invalid-shift feedback that reply 9 provokes) maps onto its checked-in
// reply file.

#include <filesystem>
#include <fstream>

#include "cbi/complexity.hpp"
#include "cbi/hash.hpp"
#include "cbi/parser.hpp"
#include "cbi/prompt.hpp"
#include "test_util.hpp"

namespace cbi_test {

inline void build_s1_fixtures(const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    cbi::SourceProgram failing = load_fixture("fig2_failing.c");
    cbi::Ast ast = cbi::parse(failing);
    cbi::MutationTarget target = cbi::select_mutation_target(ast);

    cbi::ValidationReport shift_report;
    shift_report.verdict = cbi::Verdict::SemanticInvalid;
    shift_report.cause = cbi::UbCategory::Shift;
    std::string feedback = cbi::render_feedback(shift_report).rendered;

    char name[32];
    for (const auto& rule : cbi::rule_catalog()) {
        std::snprintf(name, sizeof(name), "reply_r%02d.txt", rule.id);
        std::string reply = read_file(data_path(std::string("mock_llm/s1_replies/") + name));
        std::string prompt = cbi::render_prompt(rule, target, failing).rendered;
        for (const std::string& user_msg : {prompt, feedback + "\n" + prompt}) {
            std::ofstream out(fs::path(out_dir) / (cbi::fnv1a64_hex(user_msg) + ".txt"),
                              std::ios::binary);
            out << reply;
        }
    }
}

}  // namespace cbi_test
