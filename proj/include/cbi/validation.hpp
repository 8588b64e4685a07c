#pragma once

#include <optional>
#include <string>

#include "cbi/source_program.hpp"

namespace cbi {

enum class UbCategory { MemAccess, Shift, IndexBound, Initialization, DivisionByZero };

// Wire identifier used by the external analyzer contract.
const char* to_string(UbCategory c);
// Human-readable phrase used in feedback prompts.
const char* display_name(UbCategory c);
std::optional<UbCategory> ub_category_from_string(const std::string& s);

enum class Verdict { Valid, SemanticInvalid, OracleInvalid, Unparseable };

struct OracleCounts {
    int expected_printf = 0;
    int expected_abort = 0;
    int found_printf = 0;
    int found_abort = 0;
};

struct ValidationReport {
    Verdict verdict = Verdict::Valid;
    std::optional<UbCategory> cause;   // set when verdict == SemanticInvalid
    std::optional<OracleCounts> oracle;  // set when verdict == OracleInvalid
    int line = 0;
    std::string note;

    bool valid() const { return verdict == Verdict::Valid; }
    static ValidationReport ok() { return {}; }
};

// Constant-level static checks: division by a constant zero, shifts by a
// negative or type-width-exceeding constant, constant array indices out of
// declared bounds, straight-line use before initialization, and constant
// null/out-of-object pointer dereferences. When `analyzer_command` is
// non-empty it runs `<command> <file>` on a copy of the program and merges
// findings reported as "category:line:note" lines; the first finding in
// line order wins. Throws AnalyzerFailure when the command exits abnormally
// or emits malformed findings.
ValidationReport semantic_validate(const SourceProgram& candidate,
                                   const std::string& analyzer_command = "");

// Valid iff the candidate carries the same number of printf calls and the
// same number of abort calls as the failing program.
ValidationReport oracle_validate(const SourceProgram& candidate, const SourceProgram& failing);

}  // namespace cbi
