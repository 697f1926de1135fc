#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opex/sim/scenario.hpp"

namespace opex::knowledge {

inline constexpr const char* kNothingHappens = "Nothing happens.";

// Text-adventure view of a scenario: objects are named "<class> <n>", the agent teleports
// between fixtures with "go to", and invalid commands answer "Nothing happens.".
class TextEnv {
public:
    explicit TextEnv(const sim::Scenario& sc);

    std::string reset();
    std::string step(const std::string& command);

    const sim::WorldState& state() const { return state_; }
    sim::GoalStatus goal_status() const { return sim::check_goal(state_, goals_); }
    bool success() const { return goal_status().success; }
    const std::string& task_text() const { return task_; }

    std::string name_of(sim::ObjectIndex i) const { return names_[i]; }
    std::optional<sim::ObjectIndex> resolve(const std::string& name) const;
    // Fixture the agent stands at.
    std::optional<sim::ObjectIndex> location() const { return at_; }
    // Fixtures, in name order.
    std::vector<sim::ObjectIndex> fixtures() const;
    // Fixture an object sits in or on (its outermost container).
    sim::ObjectIndex fixture_of(sim::ObjectIndex i) const { return state_.root(i); }

private:
    sim::WorldState initial_;
    sim::WorldState state_;
    sim::GoalSpec goals_;
    std::string task_;
    std::vector<std::string> names_;
    std::optional<sim::ObjectIndex> at_;

    std::string listing(const std::vector<sim::ObjectIndex>& items) const;
    std::vector<sim::ObjectIndex> contents(sim::ObjectIndex container) const;
    std::string arrive(sim::ObjectIndex fixture) const;
    bool reachable(sim::ObjectIndex i) const;
};

// "in" for enclosed receptacles, "on" for surfaces.
std::string preposition(sim::ClassId receptacle);

}  // namespace opex::knowledge
