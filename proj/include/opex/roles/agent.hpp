#pragma once

#include <string>
#include <vector>

#include "opex/harness/trajectory.hpp"
#include "opex/roles/roles.hpp"
#include "opex/sim/simulator.hpp"
#include "opex/skills/skills.hpp"

namespace opex::roles {

struct AgentBackends {
    CompletionBackend* planner = nullptr;
    CompletionBackend* observer = nullptr;  // null: identity summarization
    CompletionBackend* executor = nullptr;
};

struct AgentConfig {
    bool use_planner = true;  // off: one subtask, the high-level instruction
    std::vector<std::string> examples;  // ranked, already rendered
    int max_replans = 4;
    int max_executor_steps = 30;  // per subtask
    int max_parse_failures = 8;
    const PromptSet* prompts = nullptr;  // default_prompts() when null
};

// Goal-object classes of a scenario and the closed containers hiding them.
std::vector<std::string> goal_classes(const sim::Scenario& sc);
std::vector<std::string> closed_goal_containers(const sim::Scenario& sc);

// Plan, then for each subtask: summarize, executor step, run skill, feed back. Never throws
// for agent-side failures; they end up in the trajectory.
harness::Trajectory run_agent(skills::AgentContext& ctx, AgentBackends backends, const AgentConfig& cfg);

}  // namespace opex::roles
