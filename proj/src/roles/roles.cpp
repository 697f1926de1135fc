#include "opex/roles/roles.hpp"

#include <algorithm>

#include "opex/common/text.hpp"

namespace opex::roles {

std::string render_list(const std::vector<std::string>& names) { return names.empty() ? "None" : text::join(names, ", "); }

namespace {

std::map<std::string, std::string> bindings(const StateBundle& b) {
    return {
        {"room_type", b.room_type},
        {"task_description", b.task_description},
        {"previously_found_objects", render_list(b.previously_found_objects)},
        {"objects_in_current_view", render_list(b.objects_in_current_view)},
        {"holding_object", b.holding_object.value_or("None")},
        {"error_message", b.error_message.value_or("None")},
    };
}

}  // namespace

std::string observer_prompt(const StateBundle& b, const PromptSet& prompts) { return prompts.observer.render(bindings(b)); }

std::string identity_description(const StateBundle& b) {
    auto v = bindings(b);
    return "Room type: " + v["room_type"] + "\nTask description: " + v["task_description"] +
           "\nPreviously found objects: " + v["previously_found_objects"] +
           "\nObjects seen in current observation: " + v["objects_in_current_view"] +
           "\nHolding object: " + v["holding_object"] + "\nError message: " + v["error_message"];
}

StateDescription summarize(const StateBundle& b, CompletionBackend* backend, const PromptSet& prompts) {
    StateDescription d;
    d.fields = b;
    if (!backend) {
        d.text = identity_description(b);
        return d;
    }
    try {
        d.text = text::trim(backend->complete(observer_prompt(b, prompts)));
        if (d.text.empty()) throw BackendError("empty description");
    } catch (const std::exception& e) {
        d.text = identity_description(b);
        d.fallback = true;
        d.fallback_reason = e.what();
    }
    return d;
}

std::optional<std::string> detect_action_failure(std::uint64_t digest_before, std::uint64_t digest_after,
                                                 sim::ActionKind action) {
    if (digest_before != digest_after) return std::nullopt;
    return std::string(sim::to_string(action)) + " had no effect";
}

std::string ShortTermMemory::render() const {
    if (entries_.empty()) return "None";
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        std::string result;
        switch (e.outcome.status) {
            case skills::SkillStatus::Done: result = "done"; break;
            case skills::SkillStatus::ReplanRequested: result = "replan requested"; break;
            case skills::SkillStatus::Failed:
                result = "failed: " + e.outcome.error_message.value_or("unknown error");
                break;
        }
        lines.push_back(std::to_string(i + 1) + ". " + render_action(e.step) + " -> " + result);
    }
    return text::join(lines, "\n");
}

std::string planner_prompt(const std::string& task, const std::vector<std::string>& examples, const PromptSet& prompts) {
    return prompts.planner.render({{"examples", examples.empty() ? "None" : text::join(examples, "\n\n")}, {"task", task}});
}

PlanResult plan(const std::string& task, const std::vector<std::string>& examples, CompletionBackend& backend,
                const PromptSet& prompts) {
    PlanResult r;
    const std::string prompt = planner_prompt(task, examples, prompts);
    for (int attempt = 0; attempt < 2; ++attempt) {
        r.raw = backend.complete(attempt == 0 ? prompt : prompt + kPlannerReminder);
        ++r.attempts;
        try {
            r.plan = parse_plan(r.raw);
            r.error.clear();
            return r;
        } catch (const ParseError& e) {
            r.error = e.what();
        }
    }
    return r;
}

std::string skill_listing() {
    std::vector<std::string> lines;
    for (const auto& e : skills::skill_catalog()) {
        const std::string form = e.arity ? std::string(e.name) + "[Target]" : std::string(e.name);
        lines.push_back("- " + form + ": " + std::string(e.description));
    }
    return text::join(lines, "\n");
}

std::string executor_prompt(const ExecutorInput& in, const PromptSet& prompts) {
    return prompts.executor.render({
        {"skills", skill_listing()},
        {"observation", in.observation.text},
        {"found_objects", render_list(in.found_objects)},
        {"visible_objects", render_list(in.visible_objects)},
        {"previous_steps", in.memory ? in.memory->render() : "None"},
        {"objective", in.objective},
    });
}

ExecutorResult executor_step(const ExecutorInput& in, CompletionBackend& backend, const PromptSet& prompts) {
    ExecutorResult r;
    const std::string prompt = executor_prompt(in, prompts);
    bool parsed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        r.raw = backend.complete(attempt == 0 ? prompt : prompt + kExecutorReminder);
        ++r.attempts;
        try {
            r.step = parse_executor(r.raw);
            parsed = true;
        } catch (const ParseError& e) {
            r.error = e.what();
        }
    }
    if (!parsed) {
        r.kind = ExecutorResult::Kind::ParseFailure;
        return r;
    }
    r.error.clear();
    if (r.step.finish()) return r;
    try {
        r.invocation = to_invocation(*r.step.play);
    } catch (const std::invalid_argument& e) {
        r.kind = ExecutorResult::Kind::Invalid;
        r.error = e.what();
        return r;
    }
    if (skills::catalog_entry(r.invocation->skill).arity == 1) {
        const auto cls = skills::resolve_class(r.invocation->target);
        const auto known = [&](const std::vector<std::string>& names) {
            return cls && std::any_of(names.begin(), names.end(), [&](const std::string& n) {
                       return skills::resolve_class(n) == cls;
                   });
        };
        if (!known(in.found_objects) && !known(in.visible_objects)) {
            r.kind = ExecutorResult::Kind::Invalid;
            r.error = "target '" + r.invocation->target + "' has not been found";
            r.invocation.reset();
        }
    }
    return r;
}

}  // namespace opex::roles
