#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opex/roles/backend.hpp"
#include "opex/roles/grammar.hpp"
#include "opex/roles/prompt_template.hpp"
#include "opex/sim/world.hpp"
#include "opex/skills/skills.hpp"

namespace opex::roles {

// Raw facts handed to the observer.
struct StateBundle {
    std::string room_type;
    std::string task_description;
    std::vector<std::string> previously_found_objects;
    std::vector<std::string> objects_in_current_view;
    std::optional<std::string> holding_object;
    std::optional<std::string> error_message;
};

struct StateDescription {
    std::string text;  // O_t^L
    StateBundle fields;
    bool fallback = false;  // backend failed; text is the raw fill
    std::string fallback_reason;
};

std::string render_list(const std::vector<std::string>& names);  // "None" when empty
std::string observer_prompt(const StateBundle& b, const PromptSet& prompts);
// The raw field block, one "Label: value" line per field.
std::string identity_description(const StateBundle& b);
// With no backend, or when it throws, falls back to identity_description.
StateDescription summarize(const StateBundle& b, CompletionBackend* backend, const PromptSet& prompts);

// Flags a failure when an action that should change the view left the digest unchanged.
std::optional<std::string> detect_action_failure(std::uint64_t digest_before, std::uint64_t digest_after,
                                                 sim::ActionKind action);

struct MemoryEntry {
    ExecutorStep step;
    skills::SkillOutcome outcome;
};

// Steps taken for the current subtask only.
class ShortTermMemory {
public:
    void push(MemoryEntry e) { entries_.push_back(std::move(e)); }
    void clear() { entries_.clear(); }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<MemoryEntry>& entries() const { return entries_; }
    // "1. Play[PutObject, Cabinet] -> failed: receptacle is closed", or "None".
    std::string render() const;

private:
    std::vector<MemoryEntry> entries_;
};

inline constexpr const char* kPlannerReminder =
    "\n\nReminder: answer with the three labeled sections 'Task type:', 'Thought:' and 'Plan:', the plan as a numbered list.";
inline constexpr const char* kExecutorReminder =
    "\n\nReminder: answer with 'Thought: ...' and then exactly one line 'Action: Play[Skill, Target]' or 'Action: Finish'.";

std::string planner_prompt(const std::string& task, const std::vector<std::string>& examples, const PromptSet& prompts);

struct PlanResult {
    std::optional<SubtaskPlan> plan;
    int attempts = 0;  // backend calls made (1, or 2 after a reprompt)
    std::string error;  // parse error of the final attempt
    std::string raw;    // last completion
};

// Parses the planner output; one reprompt with a format reminder on failure.
PlanResult plan(const std::string& task, const std::vector<std::string>& examples, CompletionBackend& backend,
                const PromptSet& prompts);

struct ExecutorInput {
    StateDescription observation;
    std::vector<std::string> found_objects;
    std::vector<std::string> visible_objects;
    const ShortTermMemory* memory = nullptr;
    std::string objective;
};

std::string skill_listing();
std::string executor_prompt(const ExecutorInput& in, const PromptSet& prompts);

struct ExecutorResult {
    enum class Kind { Ok, ParseFailure, Invalid } kind = Kind::Ok;
    ExecutorStep step;
    std::optional<skills::SkillInvocation> invocation;  // set for a valid Play
    int attempts = 0;
    std::string error;
    std::string raw;
};

// One ReAct step. Malformed output gets one reprompt; a catalog or target violation is
// returned as Invalid with a message for the next observation.
ExecutorResult executor_step(const ExecutorInput& in, CompletionBackend& backend, const PromptSet& prompts);

}  // namespace opex::roles
