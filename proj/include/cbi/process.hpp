#pragma once

#include <string>

namespace cbi {

struct ProcessResult {
    int exit_code = -1;       // -1 when the process did not exit normally
    bool signaled = false;
    int term_signal = 0;
    bool timed_out = false;
    std::string output;       // stdout and stderr combined
};

// Runs a shell command, capturing combined output. `timeout_seconds` <= 0
// means no limit; on expiry the process group is killed and `timed_out`
// is set.
ProcessResult run_command(const std::string& command, double timeout_seconds = 0);

}  // namespace cbi
