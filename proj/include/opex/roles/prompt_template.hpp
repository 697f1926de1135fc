#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace opex::roles {

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Plain text with {{name}} placeholders. Every placeholder must be bound when rendering and
// every binding must be used.
class PromptTemplate {
public:
    explicit PromptTemplate(std::string text);
    static PromptTemplate load(const std::filesystem::path& path);

    const std::vector<std::string>& placeholders() const { return names_; }
    std::string render(const std::map<std::string, std::string>& values) const;

private:
    std::string text_;
    std::vector<std::string> names_;
};

// The role templates shipped under <data>/prompts.
struct PromptSet {
    PromptTemplate planner;
    PromptTemplate observer;
    PromptTemplate executor;
    PromptTemplate reasoner;
    PromptTemplate actor;

    static PromptSet load(const std::filesystem::path& dir);
};

std::filesystem::path default_data_dir();
// Shared, loaded once from default_data_dir()/prompts.
const PromptSet& default_prompts();

}  // namespace opex::roles
