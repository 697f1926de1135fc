#pragma once

#include <string>
#include <vector>

#include "opex/roles/backend.hpp"
#include "opex/roles/grammar.hpp"
#include "opex/sim/goals.hpp"

namespace opex::roles {

// ALFRED-style task type label, e.g. PICK_CLEAN_THEN_PLACE_IN_RECEP.
std::string task_type_label(sim::TaskType t);

// Template plan per task type over the target classes.
SubtaskPlan oracle_plan(sim::TaskType type, const sim::TaskTargets& targets);

// Plays back oracle_plan for one known task, whatever the prompt says.
class RuleOraclePlanner : public CompletionBackend {
public:
    RuleOraclePlanner(sim::TaskType type, sim::TaskTargets targets) : type_(type), targets_(std::move(targets)) {}
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "rule-oracle"; }

private:
    sim::TaskType type_;
    sim::TaskTargets targets_;
};

// Identity summarization: returns the field block of the observer prompt.
class RuleOracleObserver : public CompletionBackend {
public:
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "rule-oracle"; }
};

// Skill sequence that accomplishes one subtask sentence. Unrecognized sentences fall back to
// picking up the first mentioned portable class and putting it into the last mentioned
// receptacle class.
std::vector<PlayAction> subtask_script(const std::string& objective);

// Finite-state script per subtask, driven by the "Previous steps" and "Found objects"
// sections of the executor prompt.
class RuleOracleExecutor : public CompletionBackend {
public:
    std::string complete(const std::string& prompt) override;
    std::string kind() const override { return "rule-oracle"; }
};

}  // namespace opex::roles
