#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opex/common/http.hpp"

namespace opex::roles {

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text in, text out. Implementations must be safe to call from one episode thread at a time;
// remote instances may be shared across episodes.
class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string kind() const = 0;
};

// Hex FNV-1a of the prompt; what transcripts pin.
std::string prompt_digest(const std::string& prompt);

struct TranscriptEntry {
    std::optional<std::string> prompt_digest;  // unset: accept any prompt
    std::string completion;
};

// Replays completions in order. A digest mismatch or running past the end throws.
class ScriptedBackend : public CompletionBackend {
public:
    explicit ScriptedBackend(std::vector<TranscriptEntry> entries) : entries_(std::move(entries)) {}
    static ScriptedBackend from_file(const std::filesystem::path& path);

    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "scripted-transcript"; }
    std::size_t consumed() const { return next_; }
    std::size_t remaining() const { return entries_.size() - next_; }
    // Prompts seen so far, for recording new transcripts.
    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    std::vector<TranscriptEntry> entries_;
    std::size_t next_ = 0;
    std::vector<std::string> prompts_;
};

struct RemoteConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4";
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_ms = 60000;
    int attempts = 3;
};

// OpenAI-compatible chat endpoint, temperature 0, one user message, no streaming.
class RemoteBackend : public CompletionBackend {
public:
    explicit RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {}
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "remote-endpoint"; }

private:
    RemoteConfig cfg_;
};

}  // namespace opex::roles
