#include "opex/roles/backend.hpp"

#include <fstream>
#include <json.hpp>

#include "opex/common/hashing.hpp"

namespace opex::roles {

std::string prompt_digest(const std::string& prompt) { return to_hex(fnv1a(prompt)); }

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BackendError("cannot open transcript " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("transcript " + path.string() + ": " + e.what());
    }
    std::vector<TranscriptEntry> entries;
    for (const auto& e : doc) {
        TranscriptEntry t;
        if (e.contains("prompt_digest") && !e["prompt_digest"].is_null())
            t.prompt_digest = e["prompt_digest"].get<std::string>();
        t.completion = e.at("completion").get<std::string>();
        entries.push_back(std::move(t));
    }
    return ScriptedBackend(std::move(entries));
}

std::string ScriptedBackend::complete(const std::string& prompt) {
    if (next_ >= entries_.size())
        throw BackendError("transcript exhausted after " + std::to_string(entries_.size()) + " completions");
    const TranscriptEntry& e = entries_[next_];
    if (e.prompt_digest && *e.prompt_digest != prompt_digest(prompt))
        throw BackendError("transcript entry " + std::to_string(next_) + " expects prompt " + *e.prompt_digest +
                           ", got " + prompt_digest(prompt));
    ++next_;
    prompts_.push_back(prompt);
    return e.completion;
}

std::string RemoteBackend::complete(const std::string& prompt) {
    const std::string key = http::env_credential(cfg_.api_key_env);
    nlohmann::json body = {
        {"model", cfg_.model},
        {"temperature", 0},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    http::Endpoint ep{cfg_.base_url, cfg_.path, std::chrono::milliseconds(cfg_.timeout_ms), cfg_.attempts};
    const std::string raw = http::post_json(ep, body.dump(), {{"Authorization", "Bearer " + key}});
    try {
        const auto doc = nlohmann::json::parse(raw);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("malformed completion response: " + std::string(e.what()));
    }
}

}  // namespace opex::roles
