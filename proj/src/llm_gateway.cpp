#include "cbi/llm_gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cbi/errors.hpp"
#include "cbi/hash.hpp"
#include "cbi/parser.hpp"

namespace cbi {

namespace {

using nlohmann::json;

struct ParsedUrl {
    std::string base;  // scheme://host:port
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("endpoint URL lacks a scheme: " + url);
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

json conversation_json(const Conversation& conversation, const ModelConfig& config) {
    json messages = json::array();
    for (const auto& m : conversation.messages)
        messages.push_back({{"role", m.role}, {"content", m.content}});
    return json{{"model", config.model},
                {"messages", std::move(messages)},
                {"temperature", config.temperature},
                {"max_tokens", config.max_tokens}};
}

}  // namespace

void Conversation::add_system(std::string content) {
    if (!messages.empty()) throw Error("system message must lead the conversation");
    messages.push_back({"system", std::move(content)});
}

void Conversation::add_user(std::string content) {
    if (!messages.empty() && messages.back().role == "user")
        throw Error("consecutive user messages break the turn order");
    messages.push_back({"user", std::move(content)});
}

void Conversation::add_assistant(std::string content) {
    if (messages.empty() || messages.back().role != "user")
        throw Error("assistant message requires a preceding user message");
    messages.push_back({"assistant", std::move(content)});
}

void Conversation::truncate(size_t max_messages) {
    if (messages.size() <= max_messages) return;
    std::vector<Message> kept;
    size_t begin = 0;
    if (!messages.empty() && messages[0].role == "system") {
        kept.push_back(messages[0]);
        begin = 1;
    }
    size_t budget = max_messages > kept.size() ? max_messages - kept.size() : 0;
    size_t start = messages.size() > budget ? messages.size() - budget : begin;
    while (start < messages.size() && messages[start].role == "assistant") ++start;
    for (size_t i = std::max(start, begin); i < messages.size(); ++i) kept.push_back(messages[i]);
    messages = std::move(kept);
}

LlmReply HttpGateway::complete(const Conversation& conversation, const ModelConfig& config) {
    if (conversation.messages.empty()) throw Error("conversation is empty");
    ParsedUrl url = split_url(config.endpoint);
    const std::string body = conversation_json(conversation, config).dump();

    const auto started = std::chrono::steady_clock::now();
    const auto deadline =
        started + std::chrono::duration<double>(config.timeout_s * (config.max_retries + 1));
    std::string last_error = "no attempt made";
    double backoff_s = 0.1;

    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        httplib::Client client(url.base);
        client.set_connection_timeout(std::chrono::duration<double>(config.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(config.timeout_s));
        client.set_write_timeout(std::chrono::duration<double>(config.timeout_s));
        httplib::Headers headers;
        if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        auto res = client.Post(url.path, headers, body, "application/json");
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (res) {
            if (res->status >= 200 && res->status < 300) {
                try {
                    json j = json::parse(res->body);
                    LlmReply reply;
                    reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
                    if (j.contains("usage")) {
                        const auto& u = j.at("usage");
                        if (u.contains("prompt_tokens"))
                            reply.prompt_tokens = u.at("prompt_tokens").get<int>();
                        if (u.contains("completion_tokens"))
                            reply.completion_tokens = u.at("completion_tokens").get<int>();
                    }
                    reply.latency_s = elapsed;
                    return reply;
                } catch (const json::exception& e) {
                    throw ApiError(res->status, std::string("unparseable completion body: ") + e.what());
                }
            }
            bool transient = res->status == 429 || res->status >= 500;
            if (!transient) throw ApiError(res->status, res->body);
            last_error = "status " + std::to_string(res->status);
        } else {
            auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write)
                last_error = "timeout (" + httplib::to_string(err) + ")";
            else
                last_error = httplib::to_string(err);
        }
        if (attempt == config.max_retries) break;
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) break;
        double remaining = std::chrono::duration<double>(deadline - now).count();
        std::this_thread::sleep_for(
            std::chrono::duration<double>(std::min(backoff_s, std::max(0.0, remaining - 0.01))));
        backoff_s *= 2;
    }
    if (last_error.rfind("timeout", 0) == 0) throw Timeout("completion timed out: " + last_error);
    throw TransportError("completion failed after retries: " + last_error);
}

std::string MockGateway::fixture_key(const std::string& user_message) {
    return fnv1a64_hex(user_message);
}

LlmReply MockGateway::complete(const Conversation& conversation, const ModelConfig&) {
    const Message* last = conversation.last_user();
    if (!last) throw Error("conversation has no user message");
    std::string key = fixture_key(last->content);
    std::filesystem::path file = std::filesystem::path(dir_) / (key + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ApiError(404, "no mock fixture " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    LlmReply reply;
    reply.text = ss.str();
    return reply;
}

namespace {

std::optional<std::string> first_fenced_block(const std::string& text) {
    size_t fence = text.find("```");
    if (fence == std::string::npos) return std::nullopt;
    size_t content_start = text.find('\n', fence);
    if (content_start == std::string::npos) return std::nullopt;
    ++content_start;
    size_t closing = text.find("```", content_start);
    if (closing == std::string::npos) return std::nullopt;
    // closing fence sits at the start of its own line
    size_t line_start = text.rfind('\n', closing);
    size_t block_end = (line_start != std::string::npos && line_start >= content_start)
                           ? line_start + 1
                           : content_start;
    return text.substr(content_start, block_end - content_start);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, eol - pos));
        pos = eol + 1;
    }
    return lines;
}

// A usable candidate must parse and define at least one function;
// comment- or directive-only regions parse to an empty translation unit.
bool parses(const std::string& text) {
    try {
        return !parse_text(text).functions.empty();
    } catch (const Error&) {
        return false;
    }
}

bool plausible_region_start(const std::string& line) {
    static const char* starters[] = {"int ",  "char ",   "short ",    "long ",  "unsigned ",
                                     "signed ", "float ", "double ",  "void ",  "static ",
                                     "const ", "volatile ", "extern ", "#"};
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) return false;
    for (const char* s : starters)
        if (line.compare(b, std::string(s).size(), s) == 0) return true;
    return false;
}

}  // namespace

std::optional<SourceProgram> extract_program(const LlmReply& reply) {
    if (auto block = first_fenced_block(reply.text)) {
        if (!block->empty() && parses(*block))
            return SourceProgram::from_text("candidate", *block);
        return std::nullopt;  // a fenced reply stands or falls with its first block
    }
    std::vector<std::string> lines = split_lines(reply.text);
    const size_t n = std::min<size_t>(lines.size(), 400);
    for (size_t len = n; len >= 1; --len) {
        for (size_t start = 0; start + len <= n; ++start) {
            if (!plausible_region_start(lines[start])) continue;
            std::string candidate;
            for (size_t i = start; i < start + len; ++i) {
                candidate += lines[i];
                candidate += '\n';
            }
            if (parses(candidate)) return SourceProgram::from_text("candidate", candidate);
        }
    }
    return std::nullopt;
}

}  // namespace cbi
