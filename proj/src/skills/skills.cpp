#include "opex/skills/skills.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

#include "opex/common/text.hpp"

namespace opex::skills {

using sim::ActionKind;
using sim::LowLevelAction;

namespace {

constexpr std::array<CatalogEntry, 11> kCatalog = {{
    {Skill::NavigateToObject, "NavigateToObject", 1, "Go to a found object in the room so it can be interacted with."},
    {Skill::Explore, "Explore", 0, "Move to an unexplored part of the room to discover new objects."},
    {Skill::LookAround, "LookAround", 0, "Turn around in place to observe the surroundings."},
    {Skill::RequireReplan, "RequireReplan", 0, "Ask for a new plan when the current subtask cannot be completed."},
    {Skill::PickupObject, "PickupObject", 1, "Pick up the target object."},
    {Skill::PutObject, "PutObject", 1, "Put the held object in or on the target receptacle."},
    {Skill::OpenObject, "OpenObject", 1, "Open the target object."},
    {Skill::CloseObject, "CloseObject", 1, "Close the target object."},
    {Skill::ToggleObjectOn, "ToggleObjectOn", 1, "Turn on the target object."},
    {Skill::ToggleObjectOff, "ToggleObjectOff", 1, "Turn off the target object."},
    {Skill::SliceObject, "SliceObject", 1, "Slice the target object with a held knife."},
}};

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != ' ' && c != '_' && c != '-') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

ActionKind interaction_of(Skill s) {
    switch (s) {
        case Skill::PickupObject: return ActionKind::PickupObject;
        case Skill::PutObject: return ActionKind::PutObject;
        case Skill::OpenObject: return ActionKind::OpenObject;
        case Skill::CloseObject: return ActionKind::CloseObject;
        case Skill::ToggleObjectOn: return ActionKind::ToggleObjectOn;
        case Skill::ToggleObjectOff: return ActionKind::ToggleObjectOff;
        case Skill::SliceObject: return ActionKind::SliceObject;
        default: break;
    }
    throw std::invalid_argument("not an interaction skill");
}

std::string failure_note(const LowLevelAction& a, const sim::StepOutcome& out) {
    return std::string(sim::to_string(a.kind)) + " failed: " + out.error;
}

SkillOutcome failed(SkillOutcome o, std::string_view msg) {
    o.status = SkillStatus::Failed;
    o.error_message = std::string(msg);
    return o;
}

// Shared navigation loop. With `pending` set, stops after issuing that interaction once.
struct NavRun {
    AgentContext& ctx;
    SkillOutcome& out;
    int budget;
    bool exploring_only = false;
    std::optional<sim::ClassId> target = std::nullopt;
    std::optional<Skill> interaction = std::nullopt;

    sim::StepOutcome last_interaction{};
    bool interacted = false;

    bool step(const LowLevelAction& a) {
        const auto r = ctx.act(a);
        ++out.steps_taken;
        if (!r.success) out.feedback.push_back(failure_note(a, r));
        if (sim::is_interaction(a.kind)) {
            interacted = true;
            last_interaction = r;
        }
        return r.success;
    }

    // Returns the terminal outcome status through `out`.
    void run() {
        std::optional<nav::NavGoal> goal;
        nav::DistanceField field;
        sim::CellMask grid_cache;
        int since_plan = 0;
        int stranded = 0;
        bool ever_located = false;
        bool need_goal = true;

        while (true) {
            if (ctx.sim.capped()) {
                out = failed(out, errors::kEpisodeCap);
                return;
            }
            if (out.steps_taken >= budget) {
                out = failed(out, ever_located || exploring_only ? errors::kBudget : errors::kNeverFound);
                return;
            }
            const sim::AgentPose pose = ctx.sim.state().agent;

            // Landmark goals follow the maps; exploration goals are kept until reached.
            const bool located = !exploring_only && target && ctx.maps.locate(*target, ctx.policy.use_mprime);
            if (located) {
                auto g = nav::select_navigation_goal(ctx.maps, *target, pose, ctx.explore, ctx.slice, ctx.policy,
                                                     avoid_list());
                const bool keep = g.kind == nav::NavGoal::Kind::Exploration && goal &&
                                  goal->kind == nav::NavGoal::Kind::Exploration && !need_goal;
                if (!keep) {
                    if (!g.warning.empty()) out.feedback.push_back("warning: " + g.warning);
                    if (!goal || g.cell != goal->cell || g.kind != goal->kind) since_plan = 10;
                    goal = g;
                }
                need_goal = false;
            } else if (!goal || need_goal || goal->kind != nav::NavGoal::Kind::Exploration) {
                nav::NavGoal g;
                g.kind = nav::NavGoal::Kind::Exploration;
                g.cell = nav::reachable_exploration_goal(ctx.maps, pose, ctx.explore, ctx.policy);
                goal = g;
                need_goal = false;
                since_plan = 10;
            }
            if (goal->kind != nav::NavGoal::Kind::Exploration) ever_located = true;

            sim::CellMask grid = nav::planning_grid(ctx.maps, *goal, pose.cell, ctx.policy);
            bool cut_off = !grid.at(goal->cell);
            if (!cut_off && goal->kind == nav::NavGoal::Kind::Exploration && !(grid == grid_cache))
                cut_off = !nav::fmm_distance_field(grid, {pose.cell}).reachable(goal->cell);
            if (cut_off) {
                // The goal turned out to be blocked or walled off: retarget to the closest reachable cell.
                need_goal = goal->kind != nav::NavGoal::Kind::Exploration;
                if (!need_goal) {
                    const auto from_agent = nav::fmm_distance_field(grid, {pose.cell});
                    sim::CellMask reach(grid.rows, grid.cols);
                    for (int r = 0; r < grid.rows; ++r)
                        for (int c = 0; c < grid.cols; ++c) reach.set({r, c}, from_agent.reachable({r, c}));
                    goal->cell = nav::nearest_cell(reach, goal->cell);
                }
                since_plan = 10;
                continue;
            }
            if (since_plan >= 10 || !(grid == grid_cache)) {
                field = nav::fmm_distance_field(grid, {goal->cell});
                grid_cache = std::move(grid);
                since_plan = 0;
            }

            std::optional<nav::InteractionTarget> it;
            if (goal->target_cell) {
                nav::InteractionTarget t;
                t.cell = *goal->target_cell;
                t.elevation = goal->target_elevation;
                t.visible = goal->target_handle && ctx.visible(*goal->target_handle);
                t.reposition = !goal->goal_on_target;
                if (interaction) t.pending = LowLevelAction{interaction_of(*interaction), goal->target_handle};
                it = t;
            }

            std::optional<LowLevelAction> a;
            try {
                a = nav::next_action(pose, field, it, ctx.policy.direct_stop_radius);
                stranded = 0;
            } catch (const nav::PolicyError&) {
                if (++stranded >= 3) {
                    out = failed(out, errors::kStranded);
                    return;
                }
                need_goal = true;
                if (goal->kind == nav::NavGoal::Kind::Exploration) goal.reset();
                since_plan = 10;
                continue;
            }

            if (!a) {
                if (goal->kind == nav::NavGoal::Kind::Exploration) {
                    if (exploring_only) {
                        out.status = SkillStatus::Done;
                        return;
                    }
                    goal.reset();
                    need_goal = true;
                    continue;
                }
                out.status = SkillStatus::Done;
                return;
            }

            const bool ok = step(*a);
            ++since_plan;
            if (sim::is_interaction(a->kind)) {
                if (ok) out.status = SkillStatus::Done;
                else out = failed(out, last_interaction.error);
                return;
            }
            if (!ok && a->kind == ActionKind::MoveAhead) since_plan = 10;
        }
    }

    std::vector<sim::ObjectId> avoid_list() const {
        if (interaction == Skill::PickupObject) return ctx.placed;
        return {};
    }
};

bool is_appliance(sim::ClassId cls) {
    const auto& t = sim::traits(cls);
    return t.heats_contents || t.cools_contents || t.name == "SinkBasin";
}

}  // namespace

std::span<const CatalogEntry> skill_catalog() { return kCatalog; }

const CatalogEntry& catalog_entry(Skill s) { return kCatalog[static_cast<std::size_t>(s)]; }

std::optional<Skill> parse_skill(std::string_view name) {
    for (const auto& e : kCatalog)
        if (e.name == name) return e.skill;
    return std::nullopt;
}

std::string_view to_string(Skill s) { return catalog_entry(s).name; }

std::string_view to_string(SkillStatus s) {
    switch (s) {
        case SkillStatus::Done: return "done";
        case SkillStatus::Failed: return "failed";
        case SkillStatus::ReplanRequested: return "replan-requested";
    }
    return "?";
}

void validate(const SkillInvocation& inv) {
    const int arity = catalog_entry(inv.skill).arity;
    const bool has = !text::trim(inv.target).empty();
    if (arity == 1 && !has) throw std::invalid_argument(std::string(to_string(inv.skill)) + " requires a target");
    if (arity == 0 && has) throw std::invalid_argument(std::string(to_string(inv.skill)) + " takes no target");
}

std::optional<sim::ClassId> resolve_class(std::string_view text) {
    const std::string key = squash(text);
    if (key.empty()) return std::nullopt;
    for (std::size_t i = 0; i < sim::all_classes().size(); ++i) {
        const auto& t = sim::all_classes()[i];
        if (t.structural) continue;
        if (squash(t.name) == key || squash(t.display) == key) return static_cast<sim::ClassId>(i);
    }
    // Plural or trailing digits ("mugs", "mug 1").
    std::string trimmed = key;
    while (!trimmed.empty() && std::isdigit(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
    if (!trimmed.empty() && trimmed.back() == 's') trimmed.pop_back();
    if (trimmed != key) return resolve_class(trimmed);
    return std::nullopt;
}

AgentContext::AgentContext(sim::Simulator& s, nav::PolicyConfig cfg)
    : sim(s), maps(s.state().grid().rows(), s.state().grid().cols()), policy(cfg) {
    explore.seed = policy.seed;
}

void AgentContext::refresh() {
    last_obs = sim.observe();
    maps.update(last_obs);
    explore.visit(last_obs.pose.cell, maps.cols());
}

sim::StepOutcome AgentContext::act(const LowLevelAction& a) {
    const std::uint64_t before = last_obs.digest;
    const sim::Cell ahead_cell = sim::ahead(sim.state().agent.cell, sim.state().agent.heading);
    const std::optional<sim::ObjectId> held_before = held;
    const auto target_class = a.target ? maps.label_of(*a.target, policy.use_mprime) : std::nullopt;
    const auto out = sim.step(a);
    if (!out.success && a.kind == ActionKind::MoveAhead) maps.note_collision(ahead_cell);
    if (out.success) {
        if (a.kind == ActionKind::PickupObject) {
            held = a.target;
            held_class = maps.label_of(*a.target, policy.use_mprime);
            maps.note_removed(*a.target);
        } else if (a.kind == ActionKind::PutObject) {
            const auto rec = maps.label_of(*a.target, policy.use_mprime);
            if (held_before && !(rec && is_appliance(*rec))) placed.push_back(*held_before);
            held.reset();
            held_class.reset();
        } else if (a.kind == ActionKind::SliceObject) {
            const auto where = maps.find_instance(*a.target, policy.use_mprime);
            const auto cls = maps.label_of(*a.target, policy.use_mprime);
            if (cls) slice.record(sim.state().agent.cell, *a.target, *cls, where ? where->elevation : sim::Elevation::Mid);
        }
    }
    refresh();
    if (last_obs.held) held_class = last_obs.held_class;
    if (on_step) on_step({a, out, before, target_class, &last_obs});
    return out;
}

bool AgentContext::visible(sim::ObjectId handle) const {
    return std::any_of(last_obs.detections.begin(), last_obs.detections.end(),
                       [&](const sim::Detection& d) { return d.handle == handle; });
}

std::vector<std::string> AgentContext::visible_classes() const {
    std::set<std::string> names;
    for (const auto& d : last_obs.detections)
        if (!sim::traits(d.label).structural) names.insert(std::string(sim::class_name(d.label)));
    return {names.begin(), names.end()};
}

SkillOutcome execute_skill(const SkillInvocation& inv, AgentContext& ctx) {
    validate(inv);
    SkillOutcome out;
    switch (inv.skill) {
        case Skill::RequireReplan:
            out.status = SkillStatus::ReplanRequested;
            return out;
        case Skill::LookAround: {
            std::set<sim::ClassId> before;
            for (int r = 0; r < ctx.maps.rows(); ++r)
                for (int c = 0; c < ctx.maps.cols(); ++c)
                    for (auto l : ctx.maps.effective_labels({r, c}, ctx.policy.use_mprime)) before.insert(l);
            for (int i = 0; i < 4; ++i) {
                if (ctx.sim.capped()) return failed(out, errors::kEpisodeCap);
                const LowLevelAction a{ActionKind::RotateRight, std::nullopt};
                const auto r = ctx.act(a);
                ++out.steps_taken;
                if (!r.success) out.feedback.push_back(failure_note(a, r));
            }
            std::set<std::string> fresh;
            for (int r = 0; r < ctx.maps.rows(); ++r)
                for (int c = 0; c < ctx.maps.cols(); ++c)
                    for (auto l : ctx.maps.effective_labels({r, c}, ctx.policy.use_mprime))
                        if (!before.count(l) && !sim::traits(l).structural) fresh.insert(std::string(sim::class_name(l)));
            for (const auto& n : fresh) out.feedback.push_back("saw " + n);
            out.status = SkillStatus::Done;
            return out;
        }
        case Skill::Explore: {
            NavRun run{ctx, out, ctx.nav_budget};
            run.exploring_only = true;
            run.run();
            return out;
        }
        default: break;
    }

    const auto cls = resolve_class(inv.target);
    if (!cls) return failed(out, errors::kNeverFound);

    if (inv.skill == Skill::NavigateToObject) {
        NavRun run{ctx, out, ctx.nav_budget};
        run.target = cls;
        run.run();
        return out;
    }

    if (!ctx.auto_navigate) {
        // Act on the closest mapped instance from where the agent stands.
        const auto found = ctx.maps.locate(*cls, ctx.policy.use_mprime);
        if (!found) return failed(out, errors::kNeverFound);
        const auto& c = found->candidates.front();
        const LowLevelAction a{interaction_of(inv.skill), c.handle};
        const auto r = ctx.act(a);
        out.steps_taken = 1;
        if (!r.success) {
            out.feedback.push_back(failure_note(a, r));
            return failed(out, r.error);
        }
        out.status = SkillStatus::Done;
        return out;
    }

    NavRun run{ctx, out, ctx.nav_budget};
    run.target = cls;
    run.interaction = inv.skill;
    run.run();
    return out;
}

}  // namespace opex::skills
