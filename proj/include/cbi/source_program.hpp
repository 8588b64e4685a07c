#pragma once

#include <string>

#include "cbi/errors.hpp"

namespace cbi {

// A test program as shipped with a compiler bug report: an identifier plus
// the raw source text. Lines are 1-based and newline-delimited.
struct SourceProgram {
    std::string id;
    std::string text;
    int line_count = 0;

    static SourceProgram from_text(std::string id, std::string text);
};

inline SourceProgram SourceProgram::from_text(std::string id, std::string text) {
    if (text.empty()) throw Error("source program text is empty");
    int lines = 1;
    for (char c : text)
        if (c == '\n') ++lines;
    if (!text.empty() && text.back() == '\n') --lines;
    return SourceProgram{std::move(id), std::move(text), lines};
}

}  // namespace cbi
