#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opex/sim/goals.hpp"

namespace opex::harness {

// One line of the trajectory log.
struct TrajectoryRecord {
    std::string type;  // plan | skill | step | parse_failure | invalid_action | replan | turn
    int t = 0;         // simulator steps taken when the record was written
    std::uint64_t digest = 0;
    std::string name;    // skill, action or speaker
    std::string target;  // object class or command argument
    bool success = true;
    std::string error;
    bool goal_seen = false;  // goal-object class present in M or M' after this record
    std::string detail;
    bool operator==(const TrajectoryRecord&) const = default;
};

struct Trajectory {
    std::string episode;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> goal_classes;
    // Openable receptacle classes that start closed with a goal object inside.
    std::vector<std::string> closed_goal_containers;
    std::vector<TrajectoryRecord> records;
    sim::GoalStatus goal;
    int agent_length = 0;  // executed low-level actions
    std::optional<int> expert_length;
    std::string termination;
    int parse_failures = 0;
};

namespace causes {
inline constexpr const char* kSuccess = "success";
inline constexpr const char* kPlanExhausted = "plan exhausted";
inline constexpr const char* kStepCap = "maximum number of steps reached";
inline constexpr const char* kFailureCap = "too many failed interactions";
inline constexpr const char* kLanguage = "language processing error";
inline constexpr const char* kReplanLimit = "replan limit reached";
inline constexpr const char* kTurnCap = "turn cap";
inline constexpr const char* kActorFinished = "actor finished";
}  // namespace causes

// Header line, one line per record, result line.
void write_jsonl(std::ostream& out, const Trajectory& t);
std::string to_jsonl(const Trajectory& t);
// Reads every trajectory in a log (several may be concatenated).
std::vector<Trajectory> read_jsonl(std::istream& in);

}  // namespace opex::harness
