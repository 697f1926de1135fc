#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "opex/sim/goals.hpp"

namespace opex::harness {

enum class LayoutStyle {
    Showcase,  // fixtures along the north wall, agent facing them: every goal visible at the start
    Cluttered  // fixtures on all walls, random pose, confusable distractors, optional partition
};

struct GeneratorOptions {
    sim::TaskType type = sim::TaskType::PickPlace;
    std::uint64_t seed = 0;
    LayoutStyle style = LayoutStyle::Showcase;
    bool sliced = false;
    double mislabel = 0.0;  // written into the scenario's noise block with a confusion table
    int distractors = 1;
};

// A solvable scenario document in the loader's format. Same options, same document.
nlohmann::json generate_scenario(const GeneratorOptions& opt, const std::string& name);

}  // namespace opex::harness
