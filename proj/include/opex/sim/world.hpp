#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opex/sim/geometry.hpp"
#include "opex/sim/object_classes.hpp"

namespace opex::sim {

// Opaque instance handle shared by observations and actions.
using ObjectId = std::uint64_t;
using ObjectIndex = std::uint16_t;

inline constexpr ObjectId kNoObject = 0;

struct ObjectFlags {
    bool clean = false;
    bool hot = false;
    bool cold = false;
    bool sliced = false;
    bool toggled_on = false;
    bool picked_up = false;  // set on the first successful pickup, never cleared
    bool operator==(const ObjectFlags&) const = default;
};

struct Location {
    enum class Kind : std::uint8_t { AtCell, Held, Inside };
    Kind kind = Kind::AtCell;
    Cell cell{};
    ObjectIndex container = 0;

    static Location at(Cell c) { return {Kind::AtCell, c, 0}; }
    static Location held() { return {Kind::Held, {}, 0}; }
    static Location inside(ObjectIndex r) { return {Kind::Inside, {}, r}; }
    bool operator==(const Location&) const = default;
};

// Properties fixed at load time.
struct ObjectStatic {
    std::string name;  // scenario id, e.g. "mug_1"
    ClassId cls = 0;
    ObjectId handle = kNoObject;
    Elevation elevation = Elevation::Mid;
    bool openable = false;
};

struct ObjectState {
    Location location;
    ObjectFlags flags;
    bool open = true;  // always true for non-openable objects
    bool operator==(const ObjectState&) const = default;
};

struct Layout {
    Grid grid;
    std::vector<ObjectStatic> objects;
    int view_distance = 5;
};

struct AgentPose {
    Cell cell{};
    Heading heading = Heading::North;
    Pitch pitch = Pitch::Level;
    bool operator==(const AgentPose&) const = default;
};

struct WorldState {
    std::shared_ptr<const Layout> layout;
    AgentPose agent;
    std::optional<ObjectIndex> held;
    std::vector<ObjectState> objects;
    int step_count = 0;

    const Grid& grid() const { return layout->grid; }
    const ObjectStatic& info(ObjectIndex i) const { return layout->objects[i]; }
    const ClassTraits& class_of(ObjectIndex i) const { return traits(info(i).cls); }
    std::size_t object_count() const { return objects.size(); }
    std::optional<ObjectIndex> find(ObjectId handle) const;
    std::optional<ObjectIndex> find_by_name(std::string_view name) const;

    // Outermost container, or the object itself when it is not inside anything.
    ObjectIndex root(ObjectIndex i) const;
    bool is_inside(ObjectIndex i, ObjectIndex container) const;
    // Grid cell an object occupies; nullopt while it (or its outermost container) is held.
    std::optional<Cell> cell_of(ObjectIndex i) const;
    // Elevation governing visibility and reach: that of the outermost fixture holding it.
    Elevation reach_elevation(ObjectIndex i) const;
    bool blocked(Cell c) const;  // wall or occupied by an object
    bool traversable(Cell c) const { return !blocked(c); }

    // Equality of everything but step_count.
    bool same_world(const WorldState& other) const;
};

enum class ActionKind : std::uint8_t {
    RotateRight,
    RotateLeft,
    MoveAhead,
    LookUp,
    LookDown,
    PickupObject,
    PutObject,
    OpenObject,
    CloseObject,
    ToggleObjectOn,
    ToggleObjectOff,
    SliceObject,
};

inline constexpr bool is_interaction(ActionKind k) { return k >= ActionKind::PickupObject; }
std::string_view to_string(ActionKind k);
std::optional<ActionKind> parse_action_kind(std::string_view s);
std::vector<ActionKind> navigation_actions();
std::vector<ActionKind> interaction_actions();

struct LowLevelAction {
    ActionKind kind = ActionKind::RotateRight;
    std::optional<ObjectId> target;
    bool operator==(const LowLevelAction&) const = default;
};

struct StepOutcome {
    bool success = true;
    std::string error;
};

namespace errors {
inline constexpr std::string_view kNeedsTarget = "action requires a target";
inline constexpr std::string_view kUnknownTarget = "unknown target";
inline constexpr std::string_view kHandsFull = "cannot hold more than one object";
inline constexpr std::string_view kBlocked = "cannot move ahead: path blocked";
inline constexpr std::string_view kPitchUp = "cannot look up further";
inline constexpr std::string_view kPitchDown = "cannot look down further";
inline constexpr std::string_view kNotVisible = "target not visible";
inline constexpr std::string_view kOutOfRange = "target out of range";
inline constexpr std::string_view kNotInteractable = "target not interactable";
inline constexpr std::string_view kClosed = "receptacle is closed";
inline constexpr std::string_view kNotHolding = "not holding an object";
inline constexpr std::string_view kNeedsKnife = "slicing requires a knife";
inline constexpr std::string_view kAlreadyOpen = "already open";
inline constexpr std::string_view kAlreadyClosed = "already closed";
inline constexpr std::string_view kAlreadyOn = "already on";
inline constexpr std::string_view kAlreadyOff = "already off";
inline constexpr std::string_view kAlreadySliced = "already sliced";
inline constexpr std::string_view kOpenAppliance = "cannot toggle on while open";
}  // namespace errors

// Cells in the view cone of `pose`: Manhattan distance <= view distance, within 45 degrees
// of the heading, not hidden behind a wall.
CellMask visible_cells(const Grid& grid, const AgentPose& pose, int view_distance);

// Whether the object itself would be reported by a noiseless observation.
bool object_visible(const WorldState& s, ObjectIndex i, const CellMask& view);
// Visible and close enough to act on: own cell or the cell ahead, with the right pitch.
bool in_interaction_range(const WorldState& s, ObjectIndex i);

// Applies `action` in place. A failed step only advances step_count.
StepOutcome apply_step(WorldState& s, const LowLevelAction& action);
std::pair<WorldState, StepOutcome> step(const WorldState& s, const LowLevelAction& action);

}  // namespace opex::sim
