#include "opex/sim/expert.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>

namespace opex::sim {
namespace {

std::string state_key(const WorldState& s) {
    std::string k;
    k.reserve(8 + s.objects.size() * 5);
    k.push_back(static_cast<char>(s.agent.cell.row));
    k.push_back(static_cast<char>(s.agent.cell.col));
    k.push_back(static_cast<char>(static_cast<int>(s.agent.heading) | (static_cast<int>(s.agent.pitch) << 2)));
    const int held = s.held ? *s.held : 0xffff;
    k.push_back(static_cast<char>(held & 0xff));
    k.push_back(static_cast<char>(held >> 8));
    for (const ObjectState& o : s.objects) {
        const Location& l = o.location;
        k.push_back(static_cast<char>(l.kind));
        if (l.kind == Location::Kind::AtCell) {
            k.push_back(static_cast<char>(l.cell.row));
            k.push_back(static_cast<char>(l.cell.col));
        } else if (l.kind == Location::Kind::Inside) {
            k.push_back(static_cast<char>(l.container & 0xff));
            k.push_back(static_cast<char>(l.container >> 8));
        }
        const ObjectFlags& f = o.flags;
        k.push_back(static_cast<char>(f.clean | f.hot << 1 | f.cold << 2 | f.sliced << 3 | f.toggled_on << 4 |
                                      f.picked_up << 5 | o.open << 6));
    }
    return k;
}

struct Node {
    std::size_t parent;
    LowLevelAction action;
};

}  // namespace

ExpertPlan expert_plan(const Scenario& sc, std::size_t state_limit) {
    const WorldState& start = sc.initial;
    if (check_goal(start, sc.goals).success) return {};

    bool pitch_matters = false;
    for (const auto& o : start.layout->objects) pitch_matters |= o.elevation != Elevation::Mid;
    std::vector<ActionKind> moves = {ActionKind::MoveAhead, ActionKind::RotateRight, ActionKind::RotateLeft};
    if (pitch_matters) {
        moves.push_back(ActionKind::LookUp);
        moves.push_back(ActionKind::LookDown);
    }
    const std::vector<ActionKind> interactions = interaction_actions();

    std::vector<Node> nodes{{0, {}}};
    std::unordered_map<std::string, std::size_t> seen;
    seen.emplace(state_key(start), 0);
    std::deque<std::pair<std::size_t, WorldState>> frontier;
    frontier.emplace_back(0, start);

    auto finish = [&](std::size_t node) {
        ExpertPlan plan;
        plan.states_visited = seen.size();
        for (std::size_t n = node; n != 0; n = nodes[n].parent) plan.actions.push_back(nodes[n].action);
        std::reverse(plan.actions.begin(), plan.actions.end());
        return plan;
    };

    while (!frontier.empty()) {
        auto [node, state] = std::move(frontier.front());
        frontier.pop_front();

        std::vector<LowLevelAction> candidates;
        for (ActionKind k : moves) candidates.push_back({k, std::nullopt});
        for (std::size_t i = 0; i < state.object_count(); ++i) {
            const auto idx = static_cast<ObjectIndex>(i);
            if (!in_interaction_range(state, idx)) continue;
            for (ActionKind k : interactions) candidates.push_back({k, state.info(idx).handle});
        }
        for (const LowLevelAction& a : candidates) {
            WorldState next = state;
            if (!apply_step(next, a).success) continue;
            auto [it, fresh] = seen.emplace(state_key(next), nodes.size());
            if (!fresh) continue;
            nodes.push_back({node, a});
            if (check_goal(next, sc.goals).success) return finish(nodes.size() - 1);
            if (seen.size() > state_limit) throw ExpertError("expert search exceeded the state limit");
            frontier.emplace_back(nodes.size() - 1, std::move(next));
        }
    }
    throw ExpertError("no expert trajectory");
}

int expert_path_length(const Scenario& sc) { return expert_plan(sc).length(); }

}  // namespace opex::sim
