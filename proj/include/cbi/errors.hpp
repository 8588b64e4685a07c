#pragma once

#include <stdexcept>
#include <string>

namespace cbi {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    int line;
    SyntaxError(int line_, const std::string& message)
        : Error("syntax error at line " + std::to_string(line_) + ": " + message), line(line_) {}
};

struct UnknownFunction : Error {
    explicit UnknownFunction(const std::string& name) : Error("unknown function: " + name) {}
};

struct EmptyProgram : Error {
    EmptyProgram() : Error("program declares no variables") {}
};

struct NoEligibleLocation : Error {
    NoEligibleLocation() : Error("every candidate region overlaps an oracle line") {}
};

struct NoFailure : Error {
    NoFailure() : Error("validation report carries no failure to render") {}
};

struct AnalyzerFailure : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

struct ApiError : Error {
    int status;
    std::string body;
    ApiError(int status_, const std::string& body_)
        : Error("api error " + std::to_string(status_) + ": " + body_), status(status_), body(body_) {}
};

struct Timeout : Error {
    using Error::Error;
};

struct CoverageUnavailable : Error {
    using Error::Error;
};

struct ScenarioError : Error {
    using Error::Error;
};

struct EmptyPassingSet : Error {
    EmptyPassingSet() : Error("passing set is empty") {}
};

struct DivisionGuard : Error {
    using Error::Error;
};

struct NonFiniteGradient : Error {
    NonFiniteGradient() : Error("non-finite gradient; update aborted") {}
};

struct UncoveredFile : Error {
    explicit UncoveredFile(const std::string& file)
        : Error("file not covered by the failing program: " + file) {}
};

struct MissingGroundTruth : Error {
    explicit MissingGroundTruth(const std::string& bug)
        : Error("no ground-truth faulty file present in ranking for bug " + bug) {}
};

struct SetupError : Error {
    using Error::Error;
};

struct LogMismatch : Error {
    using Error::Error;
};

}  // namespace cbi
