#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opex/sim/world.hpp"

namespace opex::sim {

enum class TaskType : std::uint8_t {
    PickPlace,
    StackPlace,
    PickTwoPlace,
    CleanPlace,
    HeatPlace,
    CoolPlace,
    ExamineInLight,
};

std::string_view to_string(TaskType t);  // "Pick&Place", ...
std::optional<TaskType> parse_task_type(std::string_view s);
std::vector<TaskType> all_task_types();

struct TaskInstruction {
    std::string high_level;
    std::vector<std::string> low_level;
    TaskType type = TaskType::PickPlace;
};

// Object classes bound to the goal slots.
struct TaskTargets {
    std::string object;
    std::string receptacle;
    std::string base;
    std::string lamp;
    bool sliced = false;
};

enum class GoalKind : std::uint8_t {
    Picked,      // slot object was picked up at least once
    Placed,      // slot object directly inside a receptacle of the receptacle class
    Stacked,     // slot object directly inside the base
    BasePlaced,  // base directly inside a receptacle of the receptacle class
    Cleaned,
    Heated,
    Cooled,
    Sliced,
    Holding,  // slot object currently held
    LightOn,  // lamp toggled on
};

enum class GoalSlot : std::uint8_t { Object, Object2, Base, Lamp };

struct GoalCondition {
    GoalKind kind = GoalKind::Picked;
    GoalSlot slot = GoalSlot::Object;
    bool operator==(const GoalCondition&) const = default;
};

std::string_view to_string(GoalKind k);
std::optional<GoalKind> parse_goal_kind(std::string_view s);
std::string_view to_string(GoalSlot s);
std::optional<GoalSlot> parse_goal_slot(std::string_view s);

struct GoalSpec {
    std::vector<GoalCondition> conditions;
    TaskTargets targets;
};

struct GoalStatus {
    int satisfied = 0;
    int total = 0;
    bool success = false;
    double ratio() const { return total > 0 ? static_cast<double>(satisfied) / total : 0.0; }
};

// Default conditions for a task type.
std::vector<GoalCondition> default_conditions(TaskType type, bool sliced);

// Best count of satisfied conditions over all assignments of distinct instances to slots.
GoalStatus check_goal(const WorldState& s, const GoalSpec& goals);

}  // namespace opex::sim
