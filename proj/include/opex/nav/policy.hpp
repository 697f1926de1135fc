#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opex/nav/fmm.hpp"
#include "opex/perception/semantic_maps.hpp"
#include "opex/sim/world.hpp"

namespace opex::nav {

using sim::ClassId;
using sim::ObjectId;

class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PolicyConfig {
    bool use_mprime = true;
    bool traversable_goal = true;   // band goal next to the target; off = goal on the target cell
    bool slice_replay = true;
    bool optimistic_unknown = true;
    int band_radius = 2;
    double direct_stop_radius = 1.5;  // stop distance when traversable_goal is off
    std::uint64_t seed = 0;
};

struct NavGoal {
    enum class Kind : std::uint8_t { Landmark, Exploration, SliceReplay };
    Cell cell{};
    Kind kind = Kind::Exploration;
    std::optional<ClassId> target_class;
    std::optional<ObjectId> target_handle;
    std::optional<Cell> target_cell;
    sim::Elevation target_elevation = sim::Elevation::Mid;
    perception::MapSource source = perception::MapSource::MPrime;
    bool goal_on_target = false;  // the goal cell is the target itself
    std::string warning;
};

std::string_view to_string(NavGoal::Kind k);

struct SliceMemory {
    std::optional<Cell> cell;
    std::optional<ObjectId> object;
    std::optional<ClassId> object_class;
    sim::Elevation elevation = sim::Elevation::Mid;

    void record(Cell agent_cell, ObjectId obj, ClassId cls, sim::Elevation e) {
        cell = agent_cell;
        object = obj;
        object_class = cls;
        elevation = e;
    }
};

struct ExplorationState {
    int calls = 0;
    std::uint64_t seed = 0;
    std::vector<int> last_visit;  // step at which each cell was last occupied, -1 never
    int clock = 0;

    void visit(Cell c, int cols);
};

// Cells with finite distance from `from` over `traversable` (with `from` forced traversable).
CellMask with_cell(CellMask m, Cell c);

Cell nearest_cell(const CellMask& allowed, Cell anchor);

// Calls 1-4 target the cells nearest the NW, NE, SE and SW corners; later calls sample
// candidates and keep the one farthest from explored cells; with no frontier left, the least
// recently visited cell.
Cell exploration_goal(ExplorationState& st, const CellMask& traversable, const CellMask& explored);

// `avoid` lists instances to pass over while another candidate of the class exists.
NavGoal select_navigation_goal(const perception::SemanticMaps& maps, ClassId target, const sim::AgentPose& pose,
                               ExplorationState& explore, const SliceMemory& slice, const PolicyConfig& cfg,
                               const std::vector<ObjectId>& avoid = {});

// A fresh exploration goal resolved to a cell reachable from the agent.
Cell reachable_exploration_goal(const perception::SemanticMaps& maps, const sim::AgentPose& pose,
                                ExplorationState& explore, const PolicyConfig& cfg);

// Planning grid for a goal: the map's traversable cells plus the agent's own cell (and the
// target cell when the goal sits on it).
CellMask planning_grid(const perception::SemanticMaps& maps, const NavGoal& goal, Cell agent, const PolicyConfig& cfg);

struct InteractionTarget {
    Cell cell{};
    sim::Elevation elevation = sim::Elevation::Mid;
    std::optional<sim::LowLevelAction> pending;
    bool visible = false;
    bool reposition = true;  // false: act from wherever the stop radius was met
};

// One low-level action following the field toward its zero set, or the pending interaction
// once the target is in reach. nullopt means arrived with nothing to do.
std::optional<sim::LowLevelAction> next_action(const sim::AgentPose& pose, const DistanceField& field,
                                               const std::optional<InteractionTarget>& target,
                                               double stop_radius = 1.5);

}  // namespace opex::nav
