#include "opex/sim/simulator.hpp"

#include "opex/common/hashing.hpp"

namespace opex::sim {

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)), state_(scenario_.initial) {}

StepOutcome Simulator::step(const LowLevelAction& action) {
    StepOutcome out = apply_step(state_, action);
    if (!out.success && is_interaction(action.kind)) ++failed_interactions_;
    return out;
}

EgocentricObservation Simulator::observe() {
    return sim::observe(state_, scenario_.noise, mix64(scenario_.seed, observations_++));
}

}  // namespace opex::sim
