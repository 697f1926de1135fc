#include "opex/roles/oracle.hpp"

#include <regex>

#include "opex/common/text.hpp"
#include "opex/skills/skills.hpp"

namespace opex::roles {

std::string task_type_label(sim::TaskType t) {
    switch (t) {
        case sim::TaskType::PickPlace: return "PICK_AND_PLACE_SIMPLE";
        case sim::TaskType::StackPlace: return "PICK_AND_PLACE_WITH_MOVABLE_RECEP";
        case sim::TaskType::PickTwoPlace: return "PICK_TWO_OBJ_AND_PLACE";
        case sim::TaskType::CleanPlace: return "PICK_CLEAN_THEN_PLACE_IN_RECEP";
        case sim::TaskType::HeatPlace: return "PICK_HEAT_THEN_PLACE_IN_RECEP";
        case sim::TaskType::CoolPlace: return "PICK_COOL_THEN_PLACE_IN_RECEP";
        case sim::TaskType::ExamineInLight: return "LOOK_AT_OBJ_IN_LIGHT";
    }
    return "UNKNOWN";
}

SubtaskPlan oracle_plan(sim::TaskType type, const sim::TaskTargets& tg) {
    const std::string& o = tg.object;
    const std::string& r = tg.receptacle;
    SubtaskPlan p;
    p.task_type = task_type_label(type);
    std::vector<std::string> s;
    std::string why;
    if (tg.sliced) {
        s = {"Pick up the Knife", "Slice the " + o, "Put the Knife on the CounterTop"};
        why = "The " + o + " has to be sliced first, which needs a knife that must be put down again. ";
    }
    switch (type) {
        case sim::TaskType::PickPlace:
            why += "I need to find the " + o + ", pick it up and put it in the " + r + ".";
            s.insert(s.end(), {"Pick up the " + o, "Put the " + o + " in the " + r});
            break;
        case sim::TaskType::StackPlace:
            why += "The " + o + " goes into the " + tg.base + ", and the " + tg.base + " then goes into the " + r + ".";
            s.insert(s.end(), {"Pick up the " + o, "Put the " + o + " in the " + tg.base, "Pick up the " + tg.base,
                               "Put the " + tg.base + " in the " + r});
            break;
        case sim::TaskType::PickTwoPlace:
            why += "Two " + o + " objects must end up in the " + r + ", and I can only carry one at a time.";
            s.insert(s.end(), {"Pick up the " + o, "Put the " + o + " in the " + r, "Pick up the " + o,
                               "Put the " + o + " in the " + r});
            break;
        case sim::TaskType::CleanPlace:
            why += "I need to pick up the " + o + ", wash it in the sink and then put it in the " + r + ".";
            s.insert(s.end(), {"Pick up the " + o, "Clean the " + o, "Put the " + o + " in the " + r});
            break;
        case sim::TaskType::HeatPlace:
            why += "I need to pick up the " + o + ", heat it in the microwave and then put it in the " + r + ".";
            s.insert(s.end(), {"Pick up the " + o, "Heat the " + o, "Put the " + o + " in the " + r});
            break;
        case sim::TaskType::CoolPlace:
            why += "I need to pick up the " + o + ", cool it in the fridge and then put it in the " + r + ".";
            s.insert(s.end(), {"Pick up the " + o, "Cool the " + o, "Put the " + o + " in the " + r});
            break;
        case sim::TaskType::ExamineInLight:
            why += "I need to hold the " + o + " and switch on the " + tg.lamp + " to look at it.";
            s.insert(s.end(), {"Pick up the " + o, "Turn on the " + tg.lamp});
            break;
    }
    p.thought = why;
    p.subtasks = std::move(s);
    return p;
}

std::string RuleOraclePlanner::complete(const std::string&) { return render_plan(oracle_plan(type_, targets_)); }

std::string RuleOracleObserver::complete(const std::string& prompt) {
    std::vector<std::string> out;
    bool on = false;
    for (const auto& line : text::split_lines(prompt)) {
        if (text::starts_with_ci(line, "Room type:")) on = true;
        if (on) out.push_back(line);
        if (on && text::starts_with_ci(line, "Error message:")) break;
    }
    if (out.empty()) throw BackendError("observer prompt has no field block");
    return text::join(out, "\n");
}

namespace {

PlayAction play(skills::Skill s, std::string target = "") { return {std::string(skills::to_string(s)), std::move(target)}; }

// Known classes named in free text, in order of mention.
std::vector<sim::ClassId> mentioned_classes(const std::string& sentence);

// "the clean mug" -> Mug
std::string class_or(const std::string& phrase) {
    if (const auto cls = skills::resolve_class(phrase)) return std::string(sim::class_name(*cls));
    const auto named = mentioned_classes(phrase);
    return named.empty() ? text::trim(phrase) : std::string(sim::class_name(named.back()));
}

std::vector<sim::ClassId> mentioned_classes(const std::string& sentence) {
    std::vector<std::string> words;
    for (auto w : text::split(text::to_lower(sentence), ' ')) {
        while (!w.empty() && !std::isalnum(static_cast<unsigned char>(w.back()))) w.pop_back();
        if (!w.empty()) words.push_back(w);
    }
    std::vector<sim::ClassId> out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i + 1 < words.size()) {
            if (auto c = skills::resolve_class(words[i] + " " + words[i + 1])) {
                out.push_back(*c);
                ++i;
                continue;
            }
        }
        if (auto c = skills::resolve_class(words[i])) out.push_back(*c);
    }
    return out;
}

}  // namespace

std::vector<PlayAction> subtask_script(const std::string& objective) {
    using skills::Skill;
    std::string s = text::trim(objective);
    while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
    const auto ic = std::regex::icase;
    static const std::regex explore(R"(^explore\b.*)", ic);
    static const std::regex look(R"(^look around\b.*)", ic);
    static const std::regex find(R"(^(?:find|go to|navigate to)\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex pick(R"(^pick up\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex put(R"(^put\s+(?:the|a|an)\s+(.+?)\s+(?:in|on|into|onto)\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex open(R"(^open\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex close(R"(^close\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex on(R"(^turn on\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex off(R"(^turn off\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex slice(R"(^slice\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex clean(R"(^(?:clean|wash)\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex heat(R"(^heat\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex cool(R"(^(?:cool|chill)\s+(?:the|a|an)\s+(.+)$)", ic);
    static const std::regex examine(R"(^examine\s+(?:the|a|an)\s+(.+?)\s+(?:under|with|by)\s+(?:the|a|an)\s+(.+)$)", ic);

    std::smatch m;
    if (std::regex_match(s, m, explore)) return {play(Skill::Explore)};
    if (std::regex_match(s, m, look)) return {play(Skill::LookAround)};
    // The pickup is skipped while that class is already in hand.
    if (std::regex_match(s, m, put)) return {play(Skill::PickupObject, class_or(m[1])), play(Skill::PutObject, class_or(m[2]))};
    if (std::regex_match(s, m, examine)) return {play(Skill::ToggleObjectOn, class_or(m[2]))};
    if (std::regex_match(s, m, find)) return {play(Skill::NavigateToObject, class_or(m[1]))};
    if (std::regex_match(s, m, pick)) return {play(Skill::PickupObject, class_or(m[1]))};
    if (std::regex_match(s, m, open)) return {play(Skill::OpenObject, class_or(m[1]))};
    if (std::regex_match(s, m, close)) return {play(Skill::CloseObject, class_or(m[1]))};
    if (std::regex_match(s, m, on)) return {play(Skill::ToggleObjectOn, class_or(m[1]))};
    if (std::regex_match(s, m, off)) return {play(Skill::ToggleObjectOff, class_or(m[1]))};
    if (std::regex_match(s, m, slice)) return {play(Skill::SliceObject, class_or(m[1]))};
    if (std::regex_match(s, m, clean))
        return {play(Skill::PutObject, "SinkBasin"), play(Skill::ToggleObjectOn, "Faucet"),
                play(Skill::PickupObject, class_or(m[1]))};
    if (std::regex_match(s, m, heat))
        return {play(Skill::OpenObject, "Microwave"),     play(Skill::PutObject, "Microwave"),
                play(Skill::CloseObject, "Microwave"),    play(Skill::ToggleObjectOn, "Microwave"),
                play(Skill::OpenObject, "Microwave"),     play(Skill::PickupObject, class_or(m[1]))};
    if (std::regex_match(s, m, cool))
        return {play(Skill::OpenObject, "Fridge"), play(Skill::PutObject, "Fridge"), play(Skill::CloseObject, "Fridge"),
                play(Skill::OpenObject, "Fridge"), play(Skill::PickupObject, class_or(m[1]))};

    // Fallback for a whole instruction.
    std::optional<sim::ClassId> item, recep;
    for (const auto c : mentioned_classes(s)) {
        if (!item && sim::traits(c).pickupable) item = c;
        else if (sim::traits(c).receptacle) recep = c;
    }
    std::vector<PlayAction> out;
    if (item) out.push_back(play(Skill::PickupObject, std::string(sim::class_name(*item))));
    if (recep) out.push_back(play(Skill::PutObject, std::string(sim::class_name(*recep))));
    return out;
}

namespace {

struct PastStep {
    PlayAction action;
    bool finish = false;
    bool done = false;
    std::string error;
};

std::string field(const std::vector<std::string>& lines, std::string_view label) {
    for (const auto& l : lines)
        if (text::starts_with_ci(l, label)) return text::trim(l.substr(label.size()));
    return {};
}

std::vector<std::string> name_list(const std::string& v) {
    std::vector<std::string> out;
    if (text::iequals(v, "None")) return out;
    for (const auto& p : text::split(v, ',')) {
        const auto t = text::trim(p);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

bool benign(const std::string& error) {
    return error == "already open" || error == "already closed" || error == "already on" || error == "already off";
}

}  // namespace

std::string RuleOracleExecutor::complete(const std::string& prompt) {
    using skills::Skill;
    const auto lines = text::split_lines(prompt);
    const std::string objective = field(lines, "Current objective:");
    std::vector<std::string> known = name_list(field(lines, "Found objects:"));
    for (const auto& v : name_list(field(lines, "Objects seeing in current observation:"))) known.push_back(v);

    std::vector<PastStep> past;
    bool in_steps = false;
    static const std::regex step_re(R"(^\d+\.\s+(.*?)\s+->\s+(done|replan requested|failed: (.*))$)");
    for (const auto& l : lines) {
        if (text::starts_with_ci(l, "Previous steps:")) {
            in_steps = true;
            continue;
        }
        if (!in_steps) continue;
        std::smatch m;
        if (!std::regex_match(l, m, step_re)) {
            if (text::trim(l) == "None") continue;
            break;
        }
        PastStep p;
        const ExecutorStep st = parse_executor("Action: " + m[1].str());
        if (st.play) p.action = *st.play;
        p.finish = st.finish();
        p.done = m[2].str() == "done";
        p.error = m[3].matched ? m[3].str() : "";
        past.push_back(std::move(p));
    }

    const auto script = subtask_script(objective);
    const auto holding = skills::resolve_class(field(lines, "Holding object:"));
    std::size_t i = 0;
    int fails = 0;
    for (const auto& p : past) {
        // Steps may have been skipped (a pickup while already holding the object).
        std::size_t j = i;
        while (j < script.size() && !(p.action == script[j])) ++j;
        if (j == script.size()) continue;
        if (j != i) fails = 0;
        i = j;
        if (p.done || benign(p.error)) {
            ++i;
            fails = 0;
        } else {
            ++fails;
        }
    }
    while (i < script.size() && script[i].skill == skills::to_string(Skill::PickupObject) && holding &&
           skills::resolve_class(script[i].target) == holding)
        ++i;

    auto say = [](const std::string& thought, const std::string& action) { return "Thought: " + thought + "\nAction: " + action; };
    if (i >= script.size()) return say("The objective is accomplished.", "Finish");
    const PlayAction& next = script[i];
    if (!past.empty()) {
        const auto& last = past.back();
        if (last.action == next && last.error == "receptacle is closed")
            return say("The " + next.target + " is closed, so I open it first.",
                       "Play[" + std::string(skills::to_string(Skill::OpenObject)) + ", " + next.target + "]");
    }
    if (fails >= 2) return say("This keeps failing; the plan needs to change.", "Play[RequireReplan]");
    if (!next.target.empty()) {
        const auto cls = skills::resolve_class(next.target);
        const bool seen = std::any_of(known.begin(), known.end(), [&](const std::string& n) {
            return cls && skills::resolve_class(n) == cls;
        });
        if (!seen) return say("I have not found the " + next.target + " yet, so I explore.", "Play[Explore]");
    }
    const std::string action = next.target.empty() ? "Play[" + next.skill + "]" : "Play[" + next.skill + ", " + next.target + "]";
    return say("Next I use " + next.skill + (next.target.empty() ? "" : " on the " + next.target) + ".", action);
}

}  // namespace opex::roles
