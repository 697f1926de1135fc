#pragma once

#include <string>
#include <utility>
#include <vector>

#include "opex/harness/metrics.hpp"

namespace testsupport {

// Fifteen failed trajectories with hand-assigned error modes, three per mode. Several sit on a
// threshold or match more than one rule, so the order of the decision list matters.
struct LabeledTrajectory {
    opex::harness::Trajectory trajectory;
    opex::harness::ErrorMode label;
};

class TrajectoryBuilder {
public:
    explicit TrajectoryBuilder(std::string name) {
        t_.episode = std::move(name);
        t_.goal_classes = {"Mug"};
        t_.goal = {1, 2, false};
        t_.expert_length = 12;
        t_.termination = "maximum number of steps reached";
    }
    TrajectoryBuilder& closed(std::string container) {
        t_.closed_goal_containers.push_back(std::move(container));
        return *this;
    }
    TrajectoryBuilder& seen(bool s) {
        seen_ = s;
        return *this;
    }
    TrajectoryBuilder& ok(const std::string& action, const std::string& target = "", int times = 1) {
        return add(action, target, true, "", times);
    }
    TrajectoryBuilder& fail(const std::string& action, const std::string& target, const std::string& error, int times = 1) {
        return add(action, target, false, error, times);
    }
    TrajectoryBuilder& moves(int n) { return ok("MoveAhead", "", n); }
    TrajectoryBuilder& blocked(int n) { return fail("MoveAhead", "", "cannot move ahead: path blocked", n); }
    opex::harness::Trajectory build() {
        t_.agent_length = static_cast<int>(t_.records.size());
        return t_;
    }

private:
    TrajectoryBuilder& add(const std::string& action, const std::string& target, bool success, const std::string& error, int times) {
        for (int i = 0; i < times; ++i) {
            opex::harness::TrajectoryRecord r;
            r.type = "step";
            r.t = static_cast<int>(t_.records.size()) + 1;
            r.name = action;
            r.target = target;
            r.success = success;
            r.error = error;
            r.goal_seen = seen_;
            t_.records.push_back(r);
        }
        return *this;
    }
    opex::harness::Trajectory t_;
    bool seen_ = true;
};

inline std::vector<LabeledTrajectory> labeled_error_fixture() {
    using M = opex::harness::ErrorMode;
    using B = TrajectoryBuilder;
    const std::string far = "target out of range";
    std::vector<LabeledTrajectory> v;
    // Goal object never mapped.
    v.push_back({B("never_seen_timeout").seen(false).moves(30).build(), M::GoalObjectNotFound});
    v.push_back({B("never_seen_bumping").seen(false).moves(5).blocked(8).build(), M::GoalObjectNotFound});
    v.push_back({B("never_seen_closed_fridge").closed("Fridge").seen(false).moves(12).build(), M::GoalObjectNotFound});
    // Goal hidden in a container the agent never managed to open.
    v.push_back({B("fridge_never_tried").closed("Fridge").moves(20).build(), M::ObjectInClosedReceptacle});
    v.push_back({B("fridge_open_failed").closed("Fridge").moves(6).fail("OpenObject", "Fridge", far, 2).fail("PickupObject", "Mug", far, 3).build(),
                 M::ObjectInClosedReceptacle});
    v.push_back({B("wrong_container_opened").closed("Fridge").ok("OpenObject", "Cabinet").blocked(4).moves(2).build(),
                 M::ObjectInClosedReceptacle});
    // Collisions at or above 30% of failed steps.
    v.push_back({B("half_collisions").moves(10).blocked(2).fail("PickupObject", "Cup", far, 2).build(), M::Collisions});
    v.push_back({B("exactly_thirty_percent").moves(10).blocked(3).fail("PickupObject", "Mug", far, 3).fail("PutObject", "Cabinet", far, 4).build(),
                 M::Collisions});
    v.push_back({B("opened_then_bumped").closed("Fridge").ok("OpenObject", "Fridge").blocked(1).build(), M::Collisions});
    // Three or more failed interactions on the goal object.
    v.push_back({B("five_failed_pickups").moves(8).fail("PickupObject", "Mug", "target not visible", 5).build(), M::InteractionFailures});
    v.push_back({B("just_under_collision_share").blocked(2).fail("PickupObject", "Mug", far, 3).fail("PutObject", "Cabinet", far, 2).build(),
                 M::InteractionFailures});
    v.push_back({B("opened_then_fumbled").closed("Fridge").ok("OpenObject", "Fridge").blocked(1).fail("PickupObject", "Mug", far, 4).build(),
                 M::InteractionFailures});
    // Nothing specific.
    v.push_back({B("clean_failure").moves(15).ok("PickupObject", "Mug").build(), M::Others});
    v.push_back({B("two_goal_failures").moves(4).fail("PickupObject", "Mug", far, 2).build(), M::Others});
    v.push_back({B("fumbling_other_object").blocked(1).fail("PickupObject", "Cup", far, 3).build(), M::Others});
    return v;
}

}  // namespace testsupport
