#include "opex/sim/world.hpp"

#include <array>
#include <cstdlib>

namespace opex::sim {

std::optional<ObjectIndex> WorldState::find(ObjectId handle) const {
    for (std::size_t i = 0; i < layout->objects.size(); ++i)
        if (layout->objects[i].handle == handle) return static_cast<ObjectIndex>(i);
    return std::nullopt;
}

std::optional<ObjectIndex> WorldState::find_by_name(std::string_view name) const {
    for (std::size_t i = 0; i < layout->objects.size(); ++i)
        if (layout->objects[i].name == name) return static_cast<ObjectIndex>(i);
    return std::nullopt;
}

ObjectIndex WorldState::root(ObjectIndex i) const {
    while (objects[i].location.kind == Location::Kind::Inside) i = objects[i].location.container;
    return i;
}

bool WorldState::is_inside(ObjectIndex i, ObjectIndex container) const {
    while (objects[i].location.kind == Location::Kind::Inside) {
        i = objects[i].location.container;
        if (i == container) return true;
    }
    return false;
}

std::optional<Cell> WorldState::cell_of(ObjectIndex i) const {
    const Location& loc = objects[root(i)].location;
    if (loc.kind == Location::Kind::AtCell) return loc.cell;
    return std::nullopt;
}

Elevation WorldState::reach_elevation(ObjectIndex i) const { return info(root(i)).elevation; }

bool WorldState::blocked(Cell c) const {
    if (grid().is_wall(c)) return true;
    for (const ObjectState& o : objects)
        if (o.location.kind == Location::Kind::AtCell && o.location.cell == c) return true;
    return false;
}

bool WorldState::same_world(const WorldState& other) const {
    return agent == other.agent && held == other.held && objects == other.objects;
}

namespace {

constexpr std::array<std::string_view, 12> kActionNames = {
    "RotateRight", "RotateLeft",   "MoveAhead",      "LookUp",          "LookDown",   "PickupObject",
    "PutObject",   "OpenObject",   "CloseObject",    "ToggleObjectOn",  "ToggleObjectOff", "SliceObject",
};

bool pitch_allows(Elevation e, Pitch p) {
    switch (e) {
        case Elevation::High: return p == Pitch::Up;
        case Elevation::Low: return p == Pitch::Down;
        case Elevation::Mid: return true;
    }
    return true;
}

// Every container between the object and its root is open.
bool chain_open(const WorldState& s, ObjectIndex i) {
    while (s.objects[i].location.kind == Location::Kind::Inside) {
        i = s.objects[i].location.container;
        if (!s.objects[i].open) return false;
    }
    return true;
}

bool reachable_cell(const WorldState& s, Cell c) {
    return c == s.agent.cell || c == ahead(s.agent.cell, s.agent.heading);
}

StepOutcome fail(std::string_view msg) { return {false, std::string(msg)}; }

// Marks every object inside `container` (recursively) with `mark`.
template <typename F>
void for_contents(WorldState& s, ObjectIndex container, F mark) {
    for (std::size_t j = 0; j < s.objects.size(); ++j)
        if (s.is_inside(static_cast<ObjectIndex>(j), container)) mark(s.objects[j]);
}

void clean_if_running_water(WorldState& s, ObjectIndex placed, ObjectIndex receptacle) {
    for (std::size_t j = 0; j < s.objects.size(); ++j) {
        const auto f = static_cast<ObjectIndex>(j);
        if (!s.class_of(f).cleans_container || !s.objects[j].flags.toggled_on) continue;
        const Location& loc = s.objects[j].location;
        if (loc.kind == Location::Kind::Inside && loc.container == receptacle) {
            s.objects[placed].flags.clean = true;
            for_contents(s, placed, [](ObjectState& o) { o.flags.clean = true; });
            return;
        }
    }
}

StepOutcome navigate(WorldState& s, ActionKind kind) {
    switch (kind) {
        case ActionKind::RotateRight: s.agent.heading = turn_right(s.agent.heading); break;
        case ActionKind::RotateLeft: s.agent.heading = turn_left(s.agent.heading); break;
        case ActionKind::MoveAhead: {
            const Cell next = ahead(s.agent.cell, s.agent.heading);
            if (s.blocked(next)) return fail(errors::kBlocked);
            s.agent.cell = next;
            break;
        }
        case ActionKind::LookUp:
            if (s.agent.pitch == Pitch::Up) return fail(errors::kPitchUp);
            s.agent.pitch = s.agent.pitch == Pitch::Down ? Pitch::Level : Pitch::Up;
            break;
        case ActionKind::LookDown:
            if (s.agent.pitch == Pitch::Down) return fail(errors::kPitchDown);
            s.agent.pitch = s.agent.pitch == Pitch::Up ? Pitch::Level : Pitch::Down;
            break;
        default: break;
    }
    return {};
}

StepOutcome interact(WorldState& s, ActionKind kind, ObjectIndex t) {
    const ClassTraits& tr = s.class_of(t);
    ObjectState& obj = s.objects[t];
    switch (kind) {
        case ActionKind::PickupObject:
            if (!tr.pickupable) return fail(errors::kNotInteractable);
            obj.location = Location::held();
            obj.flags.picked_up = true;
            s.held = t;
            return {};
        case ActionKind::PutObject: {
            if (!tr.receptacle) return fail(errors::kNotInteractable);
            if (!obj.open) return fail(errors::kClosed);
            const ObjectIndex h = *s.held;
            s.objects[h].location = Location::inside(t);
            s.held.reset();
            clean_if_running_water(s, h, t);
            return {};
        }
        case ActionKind::OpenObject:
            if (!s.info(t).openable) return fail(errors::kNotInteractable);
            if (obj.open) return fail(errors::kAlreadyOpen);
            obj.open = true;
            if (tr.heats_contents) obj.flags.toggled_on = false;
            return {};
        case ActionKind::CloseObject:
            if (!s.info(t).openable) return fail(errors::kNotInteractable);
            if (!obj.open) return fail(errors::kAlreadyClosed);
            obj.open = false;
            if (tr.cools_contents) for_contents(s, t, [](ObjectState& o) { o.flags.cold = true; });
            return {};
        case ActionKind::ToggleObjectOn:
            if (!tr.toggleable) return fail(errors::kNotInteractable);
            if (obj.flags.toggled_on) return fail(errors::kAlreadyOn);
            if (tr.heats_contents && obj.open) return fail(errors::kOpenAppliance);
            obj.flags.toggled_on = true;
            if (tr.heats_contents) for_contents(s, t, [](ObjectState& o) { o.flags.hot = true; });
            if (tr.cleans_container && obj.location.kind == Location::Kind::Inside) {
                const ObjectIndex sink = obj.location.container;
                for (std::size_t j = 0; j < s.objects.size(); ++j)
                    if (j != t && s.is_inside(static_cast<ObjectIndex>(j), sink)) s.objects[j].flags.clean = true;
            }
            return {};
        case ActionKind::ToggleObjectOff:
            if (!tr.toggleable) return fail(errors::kNotInteractable);
            if (!obj.flags.toggled_on) return fail(errors::kAlreadyOff);
            obj.flags.toggled_on = false;
            return {};
        case ActionKind::SliceObject:
            if (!tr.sliceable) return fail(errors::kNotInteractable);
            if (!s.held || !s.class_of(*s.held).slicer) return fail(errors::kNeedsKnife);
            if (obj.flags.sliced) return fail(errors::kAlreadySliced);
            obj.flags.sliced = true;
            return {};
        default: break;
    }
    return {};
}

}  // namespace

std::string_view to_string(ActionKind k) { return kActionNames[static_cast<std::size_t>(k)]; }

std::optional<ActionKind> parse_action_kind(std::string_view s) {
    for (std::size_t i = 0; i < kActionNames.size(); ++i)
        if (kActionNames[i] == s) return static_cast<ActionKind>(i);
    return std::nullopt;
}

std::vector<ActionKind> navigation_actions() {
    return {ActionKind::RotateRight, ActionKind::RotateLeft, ActionKind::MoveAhead, ActionKind::LookUp,
            ActionKind::LookDown};
}

std::vector<ActionKind> interaction_actions() {
    return {ActionKind::PickupObject,   ActionKind::PutObject,       ActionKind::OpenObject,
            ActionKind::CloseObject,    ActionKind::ToggleObjectOn,  ActionKind::ToggleObjectOff,
            ActionKind::SliceObject};
}

CellMask visible_cells(const Grid& grid, const AgentPose& pose, int view_distance) {
    CellMask mask(grid.rows(), grid.cols());
    const Cell o = pose.cell;
    for (int r = o.row - view_distance; r <= o.row + view_distance; ++r) {
        for (int c = o.col - view_distance; c <= o.col + view_distance; ++c) {
            const Cell t{r, c};
            if (!grid.in_bounds(t) || manhattan(o, t) > view_distance) continue;
            const Egocentric e = to_egocentric(o, pose.heading, t);
            if (e.forward < std::abs(e.lateral)) continue;
            // Bresenham walk; any wall strictly between the eye and the cell hides it.
            int x0 = o.col, y0 = o.row;
            const int dx = std::abs(c - x0), dy = -std::abs(r - y0);
            const int sx = x0 < c ? 1 : -1, sy = y0 < r ? 1 : -1;
            int err = dx + dy;
            bool hidden = false;
            while (true) {
                if (x0 == c && y0 == r) break;
                const int e2 = 2 * err;
                if (e2 >= dy) {
                    err += dy;
                    x0 += sx;
                }
                if (e2 <= dx) {
                    err += dx;
                    y0 += sy;
                }
                if ((x0 != c || y0 != r) && grid.is_wall({y0, x0})) {
                    hidden = true;
                    break;
                }
            }
            if (!hidden) mask.set(t, true);
        }
    }
    return mask;
}

bool object_visible(const WorldState& s, ObjectIndex i, const CellMask& view) {
    const auto cell = s.cell_of(i);
    if (!cell || !view.at(*cell)) return false;
    if (s.root(i) == i) return true;
    return chain_open(s, i) && pitch_allows(s.reach_elevation(i), s.agent.pitch);
}

bool in_interaction_range(const WorldState& s, ObjectIndex i) {
    const auto cell = s.cell_of(i);
    if (!cell || !reachable_cell(s, *cell)) return false;
    return chain_open(s, i) && pitch_allows(s.reach_elevation(i), s.agent.pitch);
}

StepOutcome apply_step(WorldState& s, const LowLevelAction& action) {
    ++s.step_count;
    if (!is_interaction(action.kind)) return navigate(s, action.kind);

    if (action.kind == ActionKind::PickupObject && s.held) return fail(errors::kHandsFull);
    if (!action.target) return fail(errors::kNeedsTarget);
    const auto t = s.find(*action.target);
    if (!t) return fail(errors::kUnknownTarget);
    if (action.kind == ActionKind::PutObject && !s.held) return fail(errors::kNotHolding);
    if (!in_interaction_range(s, *t)) {
        const CellMask view = visible_cells(s.grid(), s.agent, s.layout->view_distance);
        return fail(object_visible(s, *t, view) ? errors::kOutOfRange : errors::kNotVisible);
    }
    return interact(s, action.kind, *t);
}

std::pair<WorldState, StepOutcome> step(const WorldState& s, const LowLevelAction& action) {
    WorldState next = s;
    StepOutcome out = apply_step(next, action);
    return {std::move(next), std::move(out)};
}

}  // namespace opex::sim
