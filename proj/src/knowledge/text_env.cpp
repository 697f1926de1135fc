#include "opex/knowledge/text_env.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "opex/common/text.hpp"

namespace opex::knowledge {

using sim::Location;
using sim::ObjectIndex;

std::string preposition(sim::ClassId receptacle) {
    const auto& t = sim::traits(receptacle);
    return t.openable || t.name == "SinkBasin" || t.name == "GarbageCan" || t.name == "Bowl" || t.name == "Pot" ||
                   t.name == "Pan"
               ? "in"
               : "on";
}

TextEnv::TextEnv(const sim::Scenario& sc) : initial_(sc.initial), state_(sc.initial), goals_(sc.goals) {
    task_ = sc.task.high_level;
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i < state_.objects.size(); ++i) {
        const std::string base = text::to_lower(sim::class_name(state_.info(static_cast<ObjectIndex>(i)).cls));
        names_.push_back(base + " " + std::to_string(++counts[base]));
    }
}

std::optional<ObjectIndex> TextEnv::resolve(const std::string& name) const {
    const std::string key = text::collapse_ws(text::to_lower(name));
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == key) return static_cast<ObjectIndex>(i);
    return std::nullopt;
}

std::vector<ObjectIndex> TextEnv::fixtures() const {
    std::vector<ObjectIndex> out;
    for (std::size_t i = 0; i < state_.objects.size(); ++i)
        if (state_.objects[i].location.kind == Location::Kind::AtCell) out.push_back(static_cast<ObjectIndex>(i));
    std::sort(out.begin(), out.end(), [&](auto a, auto b) { return names_[a] < names_[b]; });
    return out;
}

std::vector<ObjectIndex> TextEnv::contents(ObjectIndex container) const {
    std::vector<ObjectIndex> out;
    for (std::size_t i = 0; i < state_.objects.size(); ++i) {
        const auto& loc = state_.objects[i].location;
        if (loc.kind == Location::Kind::Inside && loc.container == container) out.push_back(static_cast<ObjectIndex>(i));
    }
    return out;
}

std::string TextEnv::listing(const std::vector<ObjectIndex>& items) const {
    if (items.empty()) return "nothing";
    std::vector<std::string> parts;
    for (auto i : items) parts.push_back("a " + names_[i]);
    if (parts.size() == 1) return parts[0];
    std::string last = parts.back();
    parts.pop_back();
    return text::join(parts, ", ") + ", and " + last;
}

std::string TextEnv::arrive(ObjectIndex f) const {
    const std::string n = names_[f];
    if (!state_.objects[f].open) return "You arrive at " + n + ". The " + n + " is closed.";
    if (!state_.class_of(f).receptacle) return "You arrive at " + n + ".";
    const auto prep = preposition(state_.info(f).cls);
    return "You arrive at " + n + ". " + (prep == "in" ? "In" : "On") + " the " + n + ", you see " + listing(contents(f)) + ".";
}

// Objects directly in the fixture the agent stands at, or the fixture itself.
bool TextEnv::reachable(ObjectIndex i) const {
    if (!at_) return false;
    if (i == *at_) return true;
    for (ObjectIndex j = i; state_.objects[j].location.kind == Location::Kind::Inside;) {
        j = state_.objects[j].location.container;
        if (!state_.objects[j].open) return false;
        if (j == *at_) return true;
    }
    return false;
}

std::string TextEnv::reset() {
    state_ = initial_;
    at_.reset();
    return "You are in the middle of a room. Looking quickly around you, you see " + listing(fixtures()) +
           ".\nYour task is to: " + task_;
}

std::string TextEnv::step(const std::string& raw) {
    ++state_.step_count;
    const std::string cmd = text::collapse_ws(text::to_lower(text::trim(raw)));
    std::smatch m;
    static const std::regex go(R"(^go to (.+)$)");
    static const std::regex open(R"(^open (.+)$)");
    static const std::regex close(R"(^close (.+)$)");
    static const std::regex take(R"(^take (.+) from (.+)$)");
    static const std::regex put(R"(^put (.+) (?:in|on|in/on) (.+)$)");
    static const std::regex use_with(R"(^(clean|heat|cool|slice) (.+) with (.+)$)");
    static const std::regex use(R"(^use (.+)$)");
    static const std::regex examine(R"(^examine (.+)$)");

    auto& S = state_;
    if (cmd == "look") {
        if (!at_) return "You are in the middle of a room. Looking quickly around you, you see " + listing(fixtures()) + ".";
        return "You are facing the " + names_[*at_] + ". Next to it, you see nothing.";
    }
    if (cmd == "inventory") return S.held ? "You are carrying: a " + names_[*S.held] + "." : "You are not carrying anything.";
    if (std::regex_match(cmd, m, go)) {
        const auto f = resolve(m[1]);
        if (!f || S.objects[*f].location.kind != Location::Kind::AtCell) return kNothingHappens;
        at_ = *f;
        return arrive(*f);
    }
    if (std::regex_match(cmd, m, open) || std::regex_match(cmd, m, close)) {
        const bool opening = cmd.rfind("open", 0) == 0;
        const auto f = resolve(m[1]);
        if (!f || !reachable(*f) || !S.info(*f).openable || S.objects[*f].open == opening) return kNothingHappens;
        S.objects[*f].open = opening;
        if (opening && S.class_of(*f).heats_contents) S.objects[*f].flags.toggled_on = false;
        if (!opening) return "You close the " + names_[*f] + ".";
        return "You open the " + names_[*f] + ". The " + names_[*f] + " is open. In it, you see " + listing(contents(*f)) + ".";
    }
    if (std::regex_match(cmd, m, take)) {
        const auto o = resolve(m[1]);
        const auto r = resolve(m[2]);
        if (S.held || !o || !r || !reachable(*o) || !S.class_of(*o).pickupable) return kNothingHappens;
        const auto& loc = S.objects[*o].location;
        if (loc.kind != Location::Kind::Inside || loc.container != *r) return kNothingHappens;
        S.objects[*o].location = Location::held();
        S.objects[*o].flags.picked_up = true;
        S.held = *o;
        return "You pick up the " + names_[*o] + " from the " + names_[*r] + ".";
    }
    if (std::regex_match(cmd, m, put)) {
        const auto o = resolve(m[1]);
        const auto r = resolve(m[2]);
        if (!o || !r || S.held != o || !reachable(*r) || !S.class_of(*r).receptacle || !S.objects[*r].open) return kNothingHappens;
        S.objects[*o].location = Location::inside(*r);
        S.held.reset();
        return "You put the " + names_[*o] + " " + preposition(S.info(*r).cls) + " the " + names_[*r] + ".";
    }
    if (std::regex_match(cmd, m, use_with)) {
        const std::string verb = m[1];
        const auto o = resolve(m[2]);
        const auto tool = resolve(m[3]);
        if (!o || !tool) return kNothingHappens;
        const auto& tt = S.class_of(*tool);
        if (verb == "slice") {
            if (S.held != tool || !tt.slicer || !reachable(*o) || !S.class_of(*o).sliceable || S.objects[*o].flags.sliced)
                return kNothingHappens;
            S.objects[*o].flags.sliced = true;
            return "You slice the " + names_[*o] + " with the " + names_[*tool] + ".";
        }
        if (S.held != o || !reachable(*tool)) return kNothingHappens;
        if (verb == "clean" && tt.name == "SinkBasin") {
            S.objects[*o].flags.clean = true;
            return "You clean the " + names_[*o] + " using the " + names_[*tool] + ".";
        }
        if (verb == "heat" && tt.heats_contents) {
            S.objects[*o].flags.hot = true;
            return "You heat the " + names_[*o] + " using the " + names_[*tool] + ".";
        }
        if (verb == "cool" && tt.cools_contents) {
            S.objects[*o].flags.cold = true;
            return "You cool the " + names_[*o] + " using the " + names_[*tool] + ".";
        }
        return kNothingHappens;
    }
    if (std::regex_match(cmd, m, use)) {
        const auto l = resolve(m[1]);
        if (!l || !reachable(*l) || !S.class_of(*l).light_source) return kNothingHappens;
        S.objects[*l].flags.toggled_on = true;
        return "You turn on the " + names_[*l] + ".";
    }
    if (std::regex_match(cmd, m, examine)) {
        const auto o = resolve(m[1]);
        if (!o || !(reachable(*o) || S.held == o)) return kNothingHappens;
        if (S.class_of(*o).receptacle && S.objects[*o].open)
            return preposition(S.info(*o).cls) == "in" ? "In the " + names_[*o] + ", you see " + listing(contents(*o)) + "."
                                                       : "On the " + names_[*o] + ", you see " + listing(contents(*o)) + ".";
        return "There's nothing special about " + names_[*o] + ".";
    }
    return kNothingHappens;
}

}  // namespace opex::knowledge
