#pragma once

#include <cstdint>

#include "opex/sim/scenario.hpp"

namespace opex::sim {

// One episode's environment: the world state plus step/failure accounting and the seeded
// observation stream.
class Simulator {
public:
    explicit Simulator(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const WorldState& state() const { return state_; }

    StepOutcome step(const LowLevelAction& action);
    EgocentricObservation observe();
    GoalStatus goal_status() const { return check_goal(state_, scenario_.goals); }

    int steps() const { return state_.step_count; }
    int failed_interactions() const { return failed_interactions_; }
    bool step_cap_reached() const { return steps() >= scenario_.limits.max_steps; }
    bool failure_cap_reached() const { return failed_interactions_ >= scenario_.limits.max_failures; }
    bool capped() const { return step_cap_reached() || failure_cap_reached(); }

private:
    Scenario scenario_;
    WorldState state_;
    std::uint64_t observations_ = 0;
    int failed_interactions_ = 0;
};

}  // namespace opex::sim
