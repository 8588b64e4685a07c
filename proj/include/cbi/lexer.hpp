#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cbi {

enum class TokKind { Identifier, IntLit, FloatLit, CharLit, StringLit, Punct, Eof };

struct Token {
    TokKind kind = TokKind::Eof;
    std::string text;
    long long int_value = 0;  // valid for IntLit and CharLit
    int line = 0;
};

// Tokenizes a C-subset source string. Comments and preprocessor lines are
// skipped (inputs are assumed preprocessed; stray #include lines in LLM
// replies are harmless noise). Throws SyntaxError on an unterminated
// literal or an unrecognized character.
std::vector<Token> tokenize(std::string_view source);

}  // namespace cbi
