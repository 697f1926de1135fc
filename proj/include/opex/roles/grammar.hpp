#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opex/skills/skills.hpp"

namespace opex::roles {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SubtaskPlan {
    std::string task_type;  // e.g. PICK_CLEAN_THEN_PLACE_IN_RECEP
    std::string thought;
    std::vector<std::string> subtasks;
    bool operator==(const SubtaskPlan&) const = default;
};

// Labeled sections "Task type", "Thought" and "Plan"; plan items are numbered or bulleted.
SubtaskPlan parse_plan(const std::string& text);
std::string render_plan(const SubtaskPlan& plan);
inline std::string normalize_plan(const std::string& text) { return render_plan(parse_plan(text)); }

struct PlayAction {
    std::string skill;   // as written; validated separately
    std::string target;  // empty for zero-arity skills
    bool operator==(const PlayAction&) const = default;
};

struct ExecutorStep {
    std::string thought;
    std::optional<PlayAction> play;  // nullopt: Finish
    bool finish() const { return !play; }
    bool operator==(const ExecutorStep&) const = default;
};

// "Thought: ...\nAction: Play[Skill, Target]" or "... Action: Finish".
ExecutorStep parse_executor(const std::string& text);
std::string render_executor(const ExecutorStep& step);
std::string render_action(const ExecutorStep& step);
inline std::string normalize_executor(const std::string& text) { return render_executor(parse_executor(text)); }

// Catalog check: known skill, arity respected. Throws skills-level std::invalid_argument
// with a message meant to be shown to the executor.
skills::SkillInvocation to_invocation(const PlayAction& play);

}  // namespace opex::roles
