#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "opex/sim/goals.hpp"
#include "opex/sim/observation.hpp"
#include "opex/sim/world.hpp"

namespace opex::sim {

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& field, const std::string& message)
        : std::runtime_error("scenario field '" + field + "': " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct EpisodeLimits {
    int max_steps = 400;
    int max_failures = 30;
};

struct Scenario {
    std::string name;
    std::string room_type;
    WorldState initial;
    TaskInstruction task;
    GoalSpec goals;
    NoiseConfig noise;
    std::uint64_t seed = 0;
    EpisodeLimits limits;
};

Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::filesystem::path& path);

}  // namespace opex::sim
