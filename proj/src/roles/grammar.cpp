#include "opex/roles/grammar.hpp"

#include <regex>

#include "opex/common/text.hpp"

namespace opex::roles {

namespace {

// Label at the start of a line, case-insensitive, followed by ':'.
std::optional<std::string> after_label(const std::string& line, const std::vector<std::string>& labels) {
    const std::string t = text::trim(line);
    for (const auto& l : labels) {
        if (t.size() > l.size() && text::starts_with_ci(t, l)) {
            std::string rest = text::trim(t.substr(l.size()));
            if (!rest.empty() && rest.front() == ':') return text::trim(rest.substr(1));
        }
    }
    return std::nullopt;
}

bool is_label(const std::string& line, const std::vector<std::string>& labels) {
    const std::string t = text::trim(line);
    for (const auto& l : labels) {
        if (!text::starts_with_ci(t, l)) continue;
        const std::string rest = text::trim(t.substr(l.size()));
        if (!rest.empty() && rest.front() == ':') return true;
    }
    return false;
}

const std::vector<std::string> kTypeLabels = {"Task type"};
const std::vector<std::string> kThoughtLabels = {"Thought process", "Thought", "Thoughts"};
const std::vector<std::string> kPlanLabels = {"Plan"};

std::string strip_item_marker(const std::string& line) {
    static const std::regex marker(R"(^\s*(?:\d+\s*[.)]|[-*])\s*)");
    return text::trim(std::regex_replace(line, marker, "", std::regex_constants::format_first_only));
}

}  // namespace

SubtaskPlan parse_plan(const std::string& text) {
    SubtaskPlan plan;
    enum class Sec { None, Type, Thought, Plan } sec = Sec::None;
    bool saw_type = false, saw_plan = false;
    std::vector<std::string> thought;
    for (const auto& raw : text::split_lines(text)) {
        if (auto v = after_label(raw, kTypeLabels); v || is_label(raw, kTypeLabels)) {
            sec = Sec::Type;
            saw_type = true;
            plan.task_type = v.value_or("");
            continue;
        }
        if (auto v = after_label(raw, kThoughtLabels); v || is_label(raw, kThoughtLabels)) {
            sec = Sec::Thought;
            if (v && !v->empty()) thought.push_back(*v);
            continue;
        }
        if (auto v = after_label(raw, kPlanLabels); v || is_label(raw, kPlanLabels)) {
            sec = Sec::Plan;
            saw_plan = true;
            if (v && !v->empty()) plan.subtasks.push_back(strip_item_marker(*v));
            continue;
        }
        const std::string line = text::trim(raw);
        if (line.empty()) continue;
        switch (sec) {
            case Sec::Type:
                if (plan.task_type.empty()) plan.task_type = line;
                break;
            case Sec::Thought: thought.push_back(line); break;
            case Sec::Plan: {
                std::string item = strip_item_marker(line);
                if (!item.empty()) plan.subtasks.push_back(std::move(item));
                break;
            }
            case Sec::None: break;
        }
    }
    if (!saw_type || plan.task_type.empty()) throw ParseError("planner output has no 'Task type' section");
    if (!saw_plan) throw ParseError("planner output has no 'Plan' section");
    if (plan.subtasks.empty()) throw ParseError("planner output has an empty plan");
    plan.task_type = text::collapse_ws(plan.task_type);
    plan.thought = text::collapse_ws(text::join(thought, " "));
    for (auto& s : plan.subtasks) s = text::collapse_ws(s);
    return plan;
}

std::string render_plan(const SubtaskPlan& plan) {
    std::string out = "Task type: " + plan.task_type + "\nThought: " + plan.thought + "\nPlan:";
    for (std::size_t i = 0; i < plan.subtasks.size(); ++i)
        out += "\n" + std::to_string(i + 1) + ". " + plan.subtasks[i];
    return out;
}

ExecutorStep parse_executor(const std::string& text) {
    static const std::regex action_re(R"(Action\s*:\s*(.*))", std::regex::icase);
    static const std::regex play_re(R"(^Play\s*\[\s*([^,\]]*?)\s*(?:,\s*([^\]]*?)\s*)?\]\s*\.?$)", std::regex::icase);
    static const std::regex finish_re(R"(^Finish\s*(?:\[\s*\])?\s*\.?$)", std::regex::icase);

    ExecutorStep step;
    std::vector<std::string> thought;
    std::optional<std::string> action;
    bool in_thought = false;
    for (const auto& raw : text::split_lines(text)) {
        const std::string line = text::trim(raw);
        // A single-line "Thought: ... Action: ..." is common.
        std::smatch m;
        std::string head = line;
        if (std::regex_search(line, m, action_re)) {
            if (action) throw ParseError("executor output has more than one action");
            action = text::trim(m[1].str());
            head = text::trim(line.substr(0, static_cast<std::size_t>(m.position(0))));
        }
        if (auto v = after_label(head, kThoughtLabels)) {
            in_thought = !action;
            if (!v->empty()) thought.push_back(*v);
        } else if (in_thought && !head.empty()) {
            thought.push_back(head);
        }
        if (action) in_thought = false;
    }
    if (!action) throw ParseError("executor output has no 'Action:' line");
    std::smatch m;
    if (std::regex_match(*action, m, finish_re)) {
        step.play.reset();
    } else if (std::regex_match(*action, m, play_re)) {
        PlayAction p;
        p.skill = text::trim(m[1].str());
        p.target = m[2].matched ? text::collapse_ws(m[2].str()) : "";
        if (p.skill.empty()) throw ParseError("Play has no skill name");
        step.play = p;
    } else {
        throw ParseError("malformed action '" + *action + "'; expected Play[Skill, Target] or Finish");
    }
    step.thought = text::collapse_ws(text::join(thought, " "));
    return step;
}

std::string render_action(const ExecutorStep& step) {
    if (!step.play) return "Finish";
    if (step.play->target.empty()) return "Play[" + step.play->skill + "]";
    return "Play[" + step.play->skill + ", " + step.play->target + "]";
}

std::string render_executor(const ExecutorStep& step) {
    std::string out;
    if (!step.thought.empty()) out = "Thought: " + step.thought + "\n";
    return out + "Action: " + render_action(step);
}

skills::SkillInvocation to_invocation(const PlayAction& play) {
    auto skill = skills::parse_skill(play.skill);
    if (!skill) {
        for (const auto& e : skills::skill_catalog())
            if (text::iequals(e.name, play.skill)) skill = e.skill;
    }
    if (!skill) throw std::invalid_argument("unknown skill '" + play.skill + "'");
    skills::SkillInvocation inv{*skill, play.target};
    skills::validate(inv);
    return inv;
}

}  // namespace opex::roles
