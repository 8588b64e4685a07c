#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbi/source_program.hpp"

namespace cbi {

struct ModelConfig {
    std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    double temperature = 1.0;
    double timeout_s = 60;
    int max_retries = 2;
    int max_tokens = 4096;
    std::string api_key_env = "OPENAI_API_KEY";  // credentials come from the environment only
};

struct Message {
    std::string role;  // system | user | assistant
    std::string content;
};

// Chat history; user/assistant roles alternate after an optional leading
// system message.
struct Conversation {
    std::vector<Message> messages;

    void add_system(std::string content);
    void add_user(std::string content);
    void add_assistant(std::string content);
    // Drops oldest turns until at most `max_messages` remain, preserving a
    // leading system message and the user-first alternation.
    void truncate(size_t max_messages);
    const Message* last_user() const {
        for (auto it = messages.rbegin(); it != messages.rend(); ++it)
            if (it->role == "user") return &*it;
        return nullptr;
    }
};

struct LlmReply {
    std::string text;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    double latency_s = 0;
};

class LlmGateway {
public:
    virtual ~LlmGateway() = default;
    virtual LlmReply complete(const Conversation& conversation, const ModelConfig& config) = 0;
};

// OpenAI-compatible chat-completions client. Transient failures (network,
// timeouts, 5xx/429) retry with exponential backoff inside an overall
// budget of timeout_s * (max_retries + 1).
class HttpGateway final : public LlmGateway {
public:
    LlmReply complete(const Conversation& conversation, const ModelConfig& config) override;
};

// Deterministic scripted gateway: replies live in a fixture directory as
// <fnv1a64(last user message)>.txt files.
class MockGateway final : public LlmGateway {
public:
    explicit MockGateway(std::string fixture_dir) : dir_(std::move(fixture_dir)) {}
    LlmReply complete(const Conversation& conversation, const ModelConfig& config) override;

    static std::string fixture_key(const std::string& user_message);

private:
    std::string dir_;
};

// First fenced code block when it parses; otherwise the longest contiguous
// region of reply lines that parses; nullopt when neither yields a program.
std::optional<SourceProgram> extract_program(const LlmReply& reply);

}  // namespace cbi
