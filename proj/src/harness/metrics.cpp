#include "opex/harness/metrics.hpp"

#include <algorithm>

#include "opex/sim/world.hpp"

namespace opex::harness {

double path_weight(int expert_length, int agent_length) {
    if (expert_length <= 0) return 1.0;  // goal satisfied at the start; nothing to weigh
    return static_cast<double>(expert_length) / std::max(expert_length, agent_length);
}

RunMetrics compute_metrics(const std::vector<Trajectory>& trajectories) {
    RunMetrics m;
    if (trajectories.empty()) return m;
    for (const auto& t : trajectories) {
        if (!t.expert_length) throw MetricError("episode " + t.episode + " has no expert path length");
        EpisodeScore e;
        e.episode = t.episode;
        e.success = t.goal.success;
        e.gc = t.goal.ratio();
        e.expert_length = *t.expert_length;
        e.agent_length = t.agent_length;
        e.weight = path_weight(e.expert_length, e.agent_length);
        m.sr += e.success ? 1.0 : 0.0;
        m.gc += e.gc;
        m.plwsr += (e.success ? 1.0 : 0.0) * e.weight;
        m.plwgc += e.gc * e.weight;
        m.episodes.push_back(e);
    }
    const double n = static_cast<double>(trajectories.size());
    m.sr /= n;
    m.gc /= n;
    m.plwsr /= n;
    m.plwgc /= n;
    return m;
}

std::string to_string(ErrorMode m) {
    switch (m) {
        case ErrorMode::GoalObjectNotFound: return "GoalObjectNotFound";
        case ErrorMode::InteractionFailures: return "InteractionFailures";
        case ErrorMode::Collisions: return "Collisions";
        case ErrorMode::ObjectInClosedReceptacle: return "ObjectInClosedReceptacle";
        case ErrorMode::Others: return "Others";
    }
    return "Others";
}

std::vector<ErrorMode> all_error_modes() {
    return {ErrorMode::GoalObjectNotFound, ErrorMode::InteractionFailures, ErrorMode::Collisions,
            ErrorMode::ObjectInClosedReceptacle, ErrorMode::Others};
}

namespace {

bool is_interaction_name(const std::string& name) {
    const auto k = sim::parse_action_kind(name);
    return k && sim::is_interaction(*k);
}

}  // namespace

ErrorMode classify_error(const Trajectory& t) {
    if (t.goal.success) throw std::invalid_argument("episode " + t.episode + " succeeded; only failures get an error mode");
    const auto steps = [&] {
        std::vector<const TrajectoryRecord*> out;
        for (const auto& r : t.records)
            if (r.type == "step") out.push_back(&r);
        return out;
    }();

    if (std::none_of(t.records.begin(), t.records.end(), [](const auto& r) { return r.goal_seen; }))
        return ErrorMode::GoalObjectNotFound;

    for (const auto& c : t.closed_goal_containers) {
        const bool opened = std::any_of(steps.begin(), steps.end(), [&](const auto* r) {
            return r->name == "OpenObject" && r->target == c && r->success;
        });
        if (!opened) return ErrorMode::ObjectInClosedReceptacle;
    }

    int failed = 0;
    int blocked = 0;
    int goal_interactions = 0;
    for (const auto* r : steps) {
        if (r->success) continue;
        ++failed;
        if (r->error == sim::errors::kBlocked) ++blocked;
        if (is_interaction_name(r->name) &&
            std::find(t.goal_classes.begin(), t.goal_classes.end(), r->target) != t.goal_classes.end())
            ++goal_interactions;
    }
    // Integer form of blocked / failed >= 30%, exact at the boundary.
    if (failed > 0 && 100 * blocked >= kCollisionPercent * failed) return ErrorMode::Collisions;
    if (goal_interactions >= kInteractionFailureCount) return ErrorMode::InteractionFailures;
    return ErrorMode::Others;
}

std::map<ErrorMode, int> error_histogram(const std::vector<Trajectory>& trajectories) {
    std::map<ErrorMode, int> h;
    for (auto m : all_error_modes()) h[m] = 0;
    for (const auto& t : trajectories)
        if (!t.goal.success) ++h[classify_error(t)];
    return h;
}

}  // namespace opex::harness
