#include "opex/roles/prompt_template.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace opex::roles {

namespace {

struct Piece {
    bool placeholder;
    std::string text;
};

std::vector<Piece> scan(const std::string& text) {
    std::vector<Piece> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.push_back({false, text.substr(pos)});
            break;
        }
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos) throw TemplateError("unterminated placeholder at offset " + std::to_string(open));
        out.push_back({false, text.substr(pos, open - pos)});
        std::string name = text.substr(open + 2, close - open - 2);
        if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
            throw TemplateError("bad placeholder name '" + name + "'");
        out.push_back({true, std::move(name)});
        pos = close + 2;
    }
    return out;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
    std::set<std::string> seen;
    for (const auto& p : scan(text_))
        if (p.placeholder && seen.insert(p.text).second) names_.push_back(p.text);
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TemplateError("cannot open template " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return PromptTemplate(ss.str());
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    for (const auto& [k, v] : values)
        if (std::find(names_.begin(), names_.end(), k) == names_.end()) throw TemplateError("unused binding '" + k + "'");
    std::string out;
    for (const auto& p : scan(text_)) {
        if (!p.placeholder) {
            out += p.text;
            continue;
        }
        const auto it = values.find(p.text);
        if (it == values.end()) throw TemplateError("missing binding '" + p.text + "'");
        out += it->second;
    }
    return out;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    return {PromptTemplate::load(dir / "planner.txt"), PromptTemplate::load(dir / "observer.txt"),
            PromptTemplate::load(dir / "executor.txt"), PromptTemplate::load(dir / "reasoner.txt"),
            PromptTemplate::load(dir / "actor.txt")};
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("OPEX_DATA_DIR"); env && *env) return env;
    return OPEX_DEFAULT_DATA_DIR;
}

const PromptSet& default_prompts() {
    static const PromptSet set = PromptSet::load(default_data_dir() / "prompts");
    return set;
}

}  // namespace opex::roles
