#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opex/harness/trajectory.hpp"
#include "opex/knowledge/text_env.hpp"
#include "opex/roles/backend.hpp"
#include "opex/roles/prompt_template.hpp"

namespace opex::knowledge {

// Canonical relations: hold-multiple, cleans-in, heats-in, cools-in, opens-before-access,
// lights-with. Subjects are lowercased class names ("agent" for the agent itself).
struct Triple {
    std::string subject;
    std::string relation;
    bool polarity = true;
    bool operator==(const Triple&) const = default;
    auto operator<=>(const Triple&) const = default;
};

enum class Source { Learned, Human };

struct KnowledgeItem {
    std::string statement;
    Triple triple;
    int support = 1;
    Source source = Source::Learned;
    bool operator==(const KnowledgeItem&) const = default;
};

std::string to_string(Source s);
std::string to_string(const Triple& t);  // "agent hold-multiple -"

// Keyword normalization of a free-text statement; nullopt when no canonical relation fits.
std::optional<Triple> normalize_statement(const std::string& statement);
// Canonical wording for a triple.
std::string statement_for(const Triple& t);

std::vector<KnowledgeItem> load_knowledge(const std::filesystem::path& path);
void save_knowledge(const std::filesystem::path& path, const std::vector<KnowledgeItem>& items);
nlohmann::json knowledge_json(const std::vector<KnowledgeItem>& items);
std::vector<KnowledgeItem> knowledge_from_json(const nlohmann::json& doc);

// AO_i = [obs_0, a_0, obs_1, ..., obs_T] for one episode.
struct AOSequence {
    std::string episode;
    std::vector<std::string> observations;  // size == actions.size() + 1
    std::vector<std::string> actions;
};

struct ExplorationLog {
    std::vector<AOSequence> sequences;
};

nlohmann::json log_json(const ExplorationLog& log);
ExplorationLog log_from_json(const nlohmann::json& doc);

// Builds the explorer backend for one episode.
using ExplorerFactory = std::function<std::unique_ptr<roles::CompletionBackend>(const sim::Scenario&, std::uint64_t seed)>;

// Runs `budget` episodes over the scenarios (cycling) and records every observation and action.
// The explorer sees "Observation: <text>\nAction:" and answers with one command.
ExplorationLog explore_collect(const std::vector<sim::Scenario>& envs, const ExplorerFactory& explorer, int budget,
                               std::uint64_t seed, int max_actions = 30);

// Deterministic curious explorer: visits fixtures in a seeded order, opens what is closed,
// tries to take everything it sees and uses appliances on what it holds. It only puts down what it
// carries after a take has failed.
class RuleExplorer : public roles::CompletionBackend {
public:
    explicit RuleExplorer(std::uint64_t seed) : seed_(seed) {}
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "rule-oracle"; }

private:
    std::string next_command();

    std::uint64_t seed_;
    std::vector<std::string> queue_;
    std::vector<std::string> pending_;
    std::optional<std::string> held_;
    std::string here_;
    std::string last_;
    bool take_failed_ = false;  // at the current fixture
    bool started_ = false;
};

struct SummaryResult {
    std::vector<KnowledgeItem> candidates;
    std::vector<std::string> dropped;  // reasons for rejected free-text candidates
};

inline constexpr int kRepetitionThreshold = 2;  // T, in episodes

// Pattern rules over the log (rule oracle), one candidate per pattern seen in >= T episodes.
SummaryResult summarize_rules(const ExplorationLog& log, int threshold = kRepetitionThreshold);
// Free-text candidates from a backend, one statement per line, normalized into triples.
SummaryResult summarize_with(const ExplorationLog& log, roles::CompletionBackend& backend);

struct FilterResult {
    std::vector<KnowledgeItem> items;
    std::vector<std::string> log;
};

// Merges duplicate triples (supports summed), resolves opposite polarities (human over learned,
// then higher support; a tie drops both), orders by support then statement.
FilterResult filter_knowledge(const std::vector<KnowledgeItem>& candidates);

std::string render_knowledge(const std::vector<KnowledgeItem>& items);  // "- statement" lines or "None"

struct DialogueTurn {
    enum class Speaker { Reasoner, Actor } speaker = Speaker::Reasoner;
    std::string content;
    std::optional<std::string> grounded_action;  // actor turns only
};

struct DialogueResult {
    harness::Trajectory trajectory;
    std::vector<DialogueTurn> turns;
    std::vector<std::string> prompts;  // every rendered prompt, in order
};

// Reasoner then actor, strictly alternating; the actor's command runs in the text env and the
// observation joins both contexts. One turn = one reasoner/actor exchange.
DialogueResult run_dialogue(const sim::Scenario& sc, const std::vector<KnowledgeItem>& knowledge,
                            roles::CompletionBackend& reasoner, roles::CompletionBackend& actor, int turn_cap,
                            const roles::PromptSet* prompts = nullptr);

// Scripted reasoner for one scenario: walks a command plan built from the world state. It reads
// the "Known facts" block of its prompt; knowing the agent holds one object changes how it
// moves several objects.
class RuleReasoner : public roles::CompletionBackend {
public:
    explicit RuleReasoner(const sim::Scenario& sc) : env_(sc), sc_(sc) {}
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "rule-oracle"; }
    // The command plan it would follow with or without the hold-one fact.
    std::vector<std::string> command_plan(bool hold_one) const;

private:
    TextEnv env_;  // naming and initial layout only
    sim::Scenario sc_;
    std::optional<std::vector<std::string>> plan_;
    std::size_t next_ = 0;
};

// Grounds "I should <command>." into "Action: <command>"; "finish" when told the task is done.
class RuleActor : public roles::CompletionBackend {
public:
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "rule-oracle"; }
};

}  // namespace opex::knowledge
