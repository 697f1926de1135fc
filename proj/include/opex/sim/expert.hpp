#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "opex/sim/scenario.hpp"

namespace opex::sim {

class ExpertError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExpertPlan {
    std::vector<LowLevelAction> actions;
    std::size_t states_visited = 0;
    int length() const { return static_cast<int>(actions.size()); }
};

// Shortest action sequence reaching goal success, by breadth-first search over the full world
// state. Throws ExpertError("no expert trajectory") when the goal is unreachable.
ExpertPlan expert_plan(const Scenario& sc, std::size_t state_limit = 4'000'000);
int expert_path_length(const Scenario& sc);

}  // namespace opex::sim
