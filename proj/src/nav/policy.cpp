#include "opex/nav/policy.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "opex/common/hashing.hpp"

namespace opex::nav {

using sim::ActionKind;
using sim::Heading;
using sim::LowLevelAction;

std::string_view to_string(NavGoal::Kind k) {
    switch (k) {
        case NavGoal::Kind::Landmark: return "landmark";
        case NavGoal::Kind::Exploration: return "exploration";
        case NavGoal::Kind::SliceReplay: return "slice-replay";
    }
    return "?";
}

void ExplorationState::visit(Cell c, int cols) {
    const std::size_t i = static_cast<std::size_t>(c.row) * cols + c.col;
    if (last_visit.size() <= i) last_visit.resize(i + 1, -1);
    last_visit[i] = clock++;
}

CellMask with_cell(CellMask m, Cell c) {
    if (m.in_bounds(c)) m.set(c, true);
    return m;
}

namespace {

double euclid(Cell a, Cell b) { return std::hypot(a.row - b.row, a.col - b.col); }

std::vector<Cell> cells_of(const CellMask& m) {
    std::vector<Cell> out;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (m.at({r, c})) out.push_back({r, c});
    return out;
}

// Distance from the agent to an object standing on `c`: through its nearest traversable
// 4-neighbour, or directly when the cell itself is traversable.
double instance_distance(const DistanceField& from_agent, const CellMask& traversable, Cell c) {
    double best = traversable.at(c) ? from_agent.at(c) : kUnreachable;
    for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
        const Cell n = sim::ahead(c, h);
        if (traversable.at(n)) best = std::min(best, from_agent.at(n) + 1.0);
    }
    return best;
}

Heading direction_to(Cell from, Cell to) {
    if (to.row < from.row) return Heading::North;
    if (to.col > from.col) return Heading::East;
    if (to.row > from.row) return Heading::South;
    return Heading::West;
}

LowLevelAction turn_toward(Heading current, Heading wanted) {
    if (wanted == sim::turn_left(current)) return {ActionKind::RotateLeft, std::nullopt};
    return {ActionKind::RotateRight, std::nullopt};
}

std::optional<LowLevelAction> pitch_for(sim::Elevation e, sim::Pitch p) {
    if (e == sim::Elevation::High && p != sim::Pitch::Up) return LowLevelAction{ActionKind::LookUp, std::nullopt};
    if (e == sim::Elevation::Low && p != sim::Pitch::Down) return LowLevelAction{ActionKind::LookDown, std::nullopt};
    return std::nullopt;
}

}  // namespace

Cell nearest_cell(const CellMask& allowed, Cell anchor) {
    std::optional<Cell> best;
    double best_d = 0;
    for (int r = 0; r < allowed.rows; ++r)
        for (int c = 0; c < allowed.cols; ++c) {
            if (!allowed.at({r, c})) continue;
            const double d = euclid(anchor, {r, c});
            if (!best || d < best_d) {
                best = Cell{r, c};
                best_d = d;
            }
        }
    if (!best) throw PolicyError("no traversable cell");
    return *best;
}

Cell exploration_goal(ExplorationState& st, const CellMask& traversable, const CellMask& explored) {
    const auto cells = cells_of(traversable);
    if (cells.empty()) throw PolicyError("no traversable cell");
    const int call = st.calls++;
    if (call < 4) {
        const int h = traversable.rows - 1, w = traversable.cols - 1;
        const Cell corners[4] = {{0, 0}, {0, w}, {h, w}, {h, 0}};
        return nearest_cell(traversable, corners[call]);
    }
    const auto explored_cells = cells_of(explored);
    bool frontier = false;
    for (const Cell c : cells) frontier |= !explored.at(c);
    if (frontier && !explored_cells.empty()) {
        std::optional<Cell> best;
        double best_d = -1.0;
        for (std::uint64_t k = 0; k < 16; ++k) {
            const Cell c = cells[mix64(st.seed, static_cast<std::uint64_t>(call), k) % cells.size()];
            double d = kUnreachable;
            for (const Cell e : explored_cells) d = std::min(d, euclid(c, e));
            if (d > best_d) {
                best = c;
                best_d = d;
            }
        }
        if (best_d > 0.0) return *best;
        for (const Cell c : cells)
            if (!explored.at(c)) return c;
    }
    if (frontier) return cells[mix64(st.seed, static_cast<std::uint64_t>(call)) % cells.size()];
    // Everything seen: revisit the cell occupied least recently.
    Cell best = cells.front();
    int best_t = 0;
    bool first = true;
    for (const Cell c : cells) {
        const std::size_t i = static_cast<std::size_t>(c.row) * traversable.cols + c.col;
        const int t = i < st.last_visit.size() ? st.last_visit[i] : -1;
        if (first || t < best_t) {
            best = c;
            best_t = t;
            first = false;
        }
    }
    return best;
}

CellMask planning_grid(const perception::SemanticMaps& maps, const NavGoal& goal, Cell agent, const PolicyConfig& cfg) {
    CellMask t = with_cell(maps.traversable(cfg.optimistic_unknown, cfg.use_mprime), agent);
    if (goal.goal_on_target) t.set(goal.cell, true);
    return t;
}

namespace {

Cell resolve_exploration(const CellMask& traversable, const DistanceField& from_agent, const perception::SemanticMaps& maps,
                         ExplorationState& explore) {
    const Cell anchor = exploration_goal(explore, traversable, maps.explored());
    CellMask reachable(traversable.rows, traversable.cols);
    for (int r = 0; r < traversable.rows; ++r)
        for (int c = 0; c < traversable.cols; ++c) reachable.set({r, c}, from_agent.reachable({r, c}));
    return reachable.at(anchor) ? anchor : nearest_cell(reachable, anchor);
}

}  // namespace

Cell reachable_exploration_goal(const perception::SemanticMaps& maps, const sim::AgentPose& pose,
                                ExplorationState& explore, const PolicyConfig& cfg) {
    const CellMask traversable = with_cell(maps.traversable(cfg.optimistic_unknown, cfg.use_mprime), pose.cell);
    return resolve_exploration(traversable, fmm_distance_field(traversable, {pose.cell}), maps, explore);
}

NavGoal select_navigation_goal(const perception::SemanticMaps& maps, ClassId target, const sim::AgentPose& pose,
                               ExplorationState& explore, const SliceMemory& slice, const PolicyConfig& cfg,
                               const std::vector<ObjectId>& avoid) {
    const CellMask traversable = with_cell(maps.traversable(cfg.optimistic_unknown, cfg.use_mprime), pose.cell);
    const DistanceField from_agent = fmm_distance_field(traversable, {pose.cell});

    NavGoal goal;
    goal.target_class = target;

    if (cfg.slice_replay && slice.cell && slice.object_class == target && from_agent.reachable(*slice.cell)) {
        goal.kind = NavGoal::Kind::SliceReplay;
        goal.cell = *slice.cell;
        goal.target_handle = slice.object;
        if (auto where = maps.find_instance(*slice.object, cfg.use_mprime)) {
            goal.target_cell = where->cell;
            goal.target_elevation = where->elevation;
            return goal;
        }
    }

    auto found = maps.locate(target, cfg.use_mprime);
    if (found && !avoid.empty()) {
        std::vector<perception::Candidate> kept;
        for (const auto& c : found->candidates)
            if (std::find(avoid.begin(), avoid.end(), c.handle) == avoid.end()) kept.push_back(c);
        if (!kept.empty()) found->candidates = std::move(kept);
    }
    if (found) {
        goal.source = found->source;
        const perception::Candidate* chosen = nullptr;
        double chosen_d = kUnreachable;
        for (const auto& cand : found->candidates) {
            const double d = instance_distance(from_agent, traversable, cand.cell);
            if (d < chosen_d) {
                chosen = &cand;
                chosen_d = d;
            }
        }
        if (!chosen) {
            // Nothing reachable yet: aim at the geometrically closest instance.
            for (const auto& cand : found->candidates)
                if (!chosen || euclid(pose.cell, cand.cell) < euclid(pose.cell, chosen->cell)) chosen = &cand;
        }
        goal.target_handle = chosen->handle;
        goal.target_cell = chosen->cell;
        goal.target_elevation = chosen->elevation;

        if (!cfg.traversable_goal) {
            goal.kind = NavGoal::Kind::Landmark;
            goal.cell = chosen->cell;
            goal.goal_on_target = true;
            return goal;
        }
        std::optional<std::tuple<double, double, int, int>> best;
        const int R = cfg.band_radius;
        for (int r = chosen->cell.row - R; r <= chosen->cell.row + R; ++r)
            for (int c = chosen->cell.col - R; c <= chosen->cell.col + R; ++c) {
                const Cell cell{r, c};
                const double d = euclid(cell, chosen->cell);
                if (d < 1.0 || d > R || !traversable.at(cell) || !from_agent.reachable(cell)) continue;
                const auto key = std::make_tuple(d, from_agent.at(cell), r, c);
                if (!best || key < *best) best = key;
            }
        if (best) {
            goal.kind = NavGoal::Kind::Landmark;
            goal.cell = {std::get<2>(*best), std::get<3>(*best)};
            return goal;
        }
        goal.warning = "no traversable cell within the band around the target";
    }

    goal.kind = NavGoal::Kind::Exploration;
    goal.target_handle.reset();
    goal.target_cell.reset();
    goal.cell = resolve_exploration(traversable, from_agent, maps, explore);
    return goal;
}

std::optional<LowLevelAction> next_action(const sim::AgentPose& pose, const DistanceField& field,
                                          const std::optional<InteractionTarget>& target, double stop_radius) {
    if (target) {
        const int d = sim::manhattan(pose.cell, target->cell);
        const bool in_reach = target->reposition ? d <= 1 : (euclid(pose.cell, target->cell) <= stop_radius && target->visible);
        if (in_reach) {
            if (d == 1) {
                const Heading want = direction_to(pose.cell, target->cell);
                if (pose.heading != want) return turn_toward(pose.heading, want);
            }
            if (d <= 1)
                if (auto p = pitch_for(target->elevation, pose.pitch)) return p;
            return target->pending;
        }
    }
    const double v = field.at(pose.cell);
    if (v == kUnreachable) throw PolicyError("stranded");
    if (v == 0.0) return target ? target->pending : std::nullopt;

    std::optional<Heading> best;
    double best_v = v;
    for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
        const double n = field.at(sim::ahead(pose.cell, h));
        if (n < best_v) {
            best = h;
            best_v = n;
        }
    }
    if (!best) throw PolicyError("stranded");
    if (*best == pose.heading) return LowLevelAction{ActionKind::MoveAhead, std::nullopt};
    return turn_toward(pose.heading, *best);
}

}  // namespace opex::nav
