#include "opex/roles/agent.hpp"

#include <set>

#include "opex/common/text.hpp"

namespace opex::roles {

using harness::Trajectory;
using harness::TrajectoryRecord;
namespace causes = harness::causes;

std::vector<std::string> goal_classes(const sim::Scenario& sc) {
    if (sc.goals.targets.object.empty()) return {};
    return {sc.goals.targets.object};
}

std::vector<std::string> closed_goal_containers(const sim::Scenario& sc) {
    std::set<std::string> out;
    const auto& s = sc.initial;
    const auto goals = goal_classes(sc);
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const auto idx = static_cast<sim::ObjectIndex>(i);
        if (std::find(goals.begin(), goals.end(), sim::class_name(s.info(idx).cls)) == goals.end()) continue;
        for (auto j = idx; s.objects[j].location.kind == sim::Location::Kind::Inside;) {
            j = s.objects[j].location.container;
            if (s.info(j).openable && !s.objects[j].open) out.insert(std::string(sim::class_name(s.info(j).cls)));
        }
    }
    return {out.begin(), out.end()};
}

namespace {

class Episode {
public:
    Episode(skills::AgentContext& ctx, AgentBackends b, const AgentConfig& cfg)
        : ctx_(ctx), b_(b), cfg_(cfg), prompts_(cfg.prompts ? *cfg.prompts : default_prompts()) {
        const auto& sc = ctx.sim.scenario();
        traj_.episode = sc.name;
        traj_.goal_classes = goal_classes(sc);
        traj_.closed_goal_containers = closed_goal_containers(sc);
        for (const auto& g : traj_.goal_classes)
            if (auto c = sim::find_class(g)) goal_ids_.push_back(*c);
    }

    Trajectory run() {
        ctx_.refresh();
        auto user_hook = ctx_.on_step;
        ctx_.on_step = [&](const skills::StepEvent& e) {
            last_event_ = e;
            TrajectoryRecord r = base("step");
            r.name = std::string(sim::to_string(e.action.kind));
            if (e.target_class) r.target = std::string(sim::class_name(*e.target_class));
            r.success = e.outcome.success;
            r.error = e.outcome.error;
            traj_.records.push_back(std::move(r));
            if (user_hook) user_hook(e);
        };
        loop();
        ctx_.on_step = user_hook;
        traj_.goal = ctx_.sim.goal_status();
        traj_.agent_length = ctx_.sim.steps();
        return std::move(traj_);
    }

private:
    skills::AgentContext& ctx_;
    AgentBackends b_;
    const AgentConfig& cfg_;
    const PromptSet& prompts_;
    Trajectory traj_;
    std::vector<sim::ClassId> goal_ids_;
    std::optional<skills::StepEvent> last_event_;
    std::vector<std::string> feedback_;

    bool goal_seen() const {
        for (auto c : goal_ids_)
            if (ctx_.maps.locate(c, true)) return true;
        return false;
    }

    TrajectoryRecord base(std::string type) const {
        TrajectoryRecord r;
        r.type = std::move(type);
        r.t = ctx_.sim.steps();
        r.digest = ctx_.last_obs.digest;
        r.goal_seen = goal_seen();
        return r;
    }

    std::optional<std::string> terminal() const {
        if (ctx_.sim.goal_status().success) return causes::kSuccess;
        if (ctx_.sim.step_cap_reached()) return causes::kStepCap;
        if (ctx_.sim.failure_cap_reached()) return causes::kFailureCap;
        return std::nullopt;
    }

    std::optional<SubtaskPlan> make_plan() {
        const auto& task = ctx_.sim.scenario().task;
        if (!cfg_.use_planner || !b_.planner) {
            SubtaskPlan p;
            p.task_type = "NONE";
            p.subtasks = {task.high_level};
            return p;
        }
        std::string prompt_task = task.high_level;
        if (!feedback_.empty()) prompt_task += "\nFeedback from previous attempts:\n" + text::join(feedback_, "\n");
        PlanResult pr;
        try {
            pr = plan(prompt_task, cfg_.examples, *b_.planner, prompts_);
        } catch (const BackendError& e) {
            pr.error = std::string("backend: ") + e.what();
        }
        TrajectoryRecord r = base(pr.plan ? "plan" : "parse_failure");
        r.name = "planner";
        r.success = pr.plan.has_value();
        r.error = pr.error;
        r.detail = pr.plan ? render_plan(*pr.plan) : pr.raw;
        traj_.records.push_back(std::move(r));
        if (!pr.plan) ++traj_.parse_failures;
        return pr.plan;
    }

    StateBundle bundle(const std::string& subtask, const std::optional<std::string>& error) const {
        StateBundle b;
        b.room_type = ctx_.sim.scenario().room_type;
        b.task_description = subtask;
        b.previously_found_objects = found();
        b.objects_in_current_view = ctx_.visible_classes();
        if (ctx_.held_class) b.holding_object = std::string(sim::class_name(*ctx_.held_class));
        b.error_message = error;
        return b;
    }

    std::vector<std::string> found() const {
        std::set<std::string> names;
        for (int r = 0; r < ctx_.maps.rows(); ++r)
            for (int c = 0; c < ctx_.maps.cols(); ++c)
                for (auto l : ctx_.maps.effective_labels({r, c}, ctx_.policy.use_mprime))
                    if (!sim::traits(l).structural) names.insert(std::string(sim::class_name(l)));
        return {names.begin(), names.end()};
    }

    void loop() {
        auto p = make_plan();
        if (!p) {
            traj_.termination = causes::kLanguage;
            return;
        }
        std::multiset<std::string> finished;
        std::size_t i = 0;
        int replans = 0;
        ShortTermMemory memory;
        while (true) {
            if (auto t = terminal()) {
                traj_.termination = *t;
                return;
            }
            if (i >= p->subtasks.size()) {
                traj_.termination = causes::kPlanExhausted;
                return;
            }
            const std::string subtask = p->subtasks[i];
            memory.clear();
            std::optional<std::string> error;
            bool replan = false;
            bool done = false;
            for (int k = 0; k < cfg_.max_executor_steps && !done && !replan; ++k) {
                if (terminal()) break;
                const auto desc = summarize(bundle(subtask, error), b_.observer, prompts_);
                ExecutorInput in{desc, found(), ctx_.visible_classes(), &memory, subtask};
                ExecutorResult er;
                try {
                    er = executor_step(in, *b_.executor, prompts_);
                } catch (const BackendError& e) {
                    er.kind = ExecutorResult::Kind::ParseFailure;
                    er.error = std::string("backend: ") + e.what();
                }
                if (er.kind == ExecutorResult::Kind::ParseFailure) {
                    TrajectoryRecord r = base("parse_failure");
                    r.name = "executor";
                    r.success = false;
                    r.error = er.error;
                    r.detail = er.raw;
                    traj_.records.push_back(std::move(r));
                    if (++traj_.parse_failures >= cfg_.max_parse_failures) {
                        traj_.termination = causes::kLanguage;
                        return;
                    }
                    error = "could not parse the action: " + er.error;
                    continue;
                }
                if (er.kind == ExecutorResult::Kind::Invalid) {
                    TrajectoryRecord r = base("invalid_action");
                    r.name = "executor";
                    r.success = false;
                    r.error = er.error;
                    r.detail = render_action(er.step);
                    traj_.records.push_back(std::move(r));
                    error = er.error;
                    continue;
                }
                if (er.step.finish()) {
                    done = true;
                    break;
                }
                last_event_.reset();
                const auto out = skills::execute_skill(*er.invocation, ctx_);
                TrajectoryRecord r = base("skill");
                r.name = std::string(skills::to_string(er.invocation->skill));
                r.target = er.invocation->target;
                r.success = out.status != skills::SkillStatus::Failed;
                r.error = out.error_message.value_or("");
                r.detail = text::join(out.feedback, "; ");
                traj_.records.push_back(std::move(r));
                memory.push({er.step, out});
                error.reset();
                if (out.error_message) {
                    error = out.error_message;
                    feedback_.push_back(subtask + ": " + render_action(er.step) + " failed: " + *out.error_message);
                } else if (last_event_) {
                    error = detect_action_failure(last_event_->digest_before, ctx_.last_obs.digest, last_event_->action.kind);
                }
                if (out.status == skills::SkillStatus::ReplanRequested) replan = true;
            }
            if (auto t = terminal()) {
                traj_.termination = *t;
                return;
            }
            if (done) {
                finished.insert(subtask);
                ++i;
                continue;
            }
            // Replan requested, or the subtask ran out of executor steps.
            if (++replans > cfg_.max_replans) {
                traj_.termination = causes::kReplanLimit;
                return;
            }
            TrajectoryRecord r = base("replan");
            r.name = "executor";
            r.detail = subtask;
            traj_.records.push_back(std::move(r));
            p = make_plan();
            if (!p) {
                traj_.termination = causes::kLanguage;
                return;
            }
            // Resume at the first subtask of the new plan not already finished.
            auto pending = finished;
            i = 0;
            while (i < p->subtasks.size()) {
                auto it = pending.find(p->subtasks[i]);
                if (it == pending.end()) break;
                pending.erase(it);
                ++i;
            }
        }
    }
};

}  // namespace

Trajectory run_agent(skills::AgentContext& ctx, AgentBackends backends, const AgentConfig& cfg) {
    if (!backends.executor) throw std::invalid_argument("run_agent needs an executor backend");
    return Episode(ctx, backends, cfg).run();
}

}  // namespace opex::roles
