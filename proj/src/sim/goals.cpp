#include "opex/sim/goals.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace opex::sim {
namespace {

constexpr std::array<std::string_view, 7> kTaskNames = {
    "Pick&Place", "Stack&Place", "PickTwo&Place", "Clean&Place", "Heat&Place", "Cool&Place", "ExamineInLight",
};
constexpr std::array<std::string_view, 10> kGoalNames = {
    "picked", "placed", "stacked", "base_placed", "cleaned", "heated", "cooled", "sliced", "holding", "light_on",
};
constexpr std::array<std::string_view, 4> kSlotNames = {"object", "object2", "base", "lamp"};

template <typename E, std::size_t N>
std::optional<E> parse_name(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<E>(i);
    return std::nullopt;
}

bool directly_inside_class(const WorldState& s, ObjectIndex i, const std::string& cls) {
    const Location& loc = s.objects[i].location;
    return loc.kind == Location::Kind::Inside && class_name(s.info(loc.container).cls) == cls;
}

bool holds(const WorldState& s, const GoalSpec& g, const GoalCondition& c, const std::array<int, 4>& slots) {
    const int idx = slots[static_cast<std::size_t>(c.slot)];
    if (idx < 0) return false;
    const auto i = static_cast<ObjectIndex>(idx);
    const ObjectState& o = s.objects[i];
    switch (c.kind) {
        case GoalKind::Picked: return o.flags.picked_up;
        case GoalKind::Placed: return directly_inside_class(s, i, g.targets.receptacle);
        case GoalKind::Stacked: {
            const int base = slots[static_cast<std::size_t>(GoalSlot::Base)];
            return base >= 0 && o.location.kind == Location::Kind::Inside && o.location.container == base;
        }
        case GoalKind::BasePlaced: return directly_inside_class(s, i, g.targets.receptacle);
        case GoalKind::Cleaned: return o.flags.clean;
        case GoalKind::Heated: return o.flags.hot;
        case GoalKind::Cooled: return o.flags.cold;
        case GoalKind::Sliced: return o.flags.sliced;
        case GoalKind::Holding: return s.held && *s.held == i;
        case GoalKind::LightOn: return o.flags.toggled_on;
    }
    return false;
}

}  // namespace

std::string_view to_string(TaskType t) { return kTaskNames[static_cast<std::size_t>(t)]; }
std::optional<TaskType> parse_task_type(std::string_view s) { return parse_name<TaskType>(kTaskNames, s); }
std::vector<TaskType> all_task_types() {
    std::vector<TaskType> out;
    for (std::size_t i = 0; i < kTaskNames.size(); ++i) out.push_back(static_cast<TaskType>(i));
    return out;
}
std::string_view to_string(GoalKind k) { return kGoalNames[static_cast<std::size_t>(k)]; }
std::optional<GoalKind> parse_goal_kind(std::string_view s) { return parse_name<GoalKind>(kGoalNames, s); }
std::string_view to_string(GoalSlot s) { return kSlotNames[static_cast<std::size_t>(s)]; }
std::optional<GoalSlot> parse_goal_slot(std::string_view s) { return parse_name<GoalSlot>(kSlotNames, s); }

std::vector<GoalCondition> default_conditions(TaskType type, bool sliced) {
    using K = GoalKind;
    using S = GoalSlot;
    std::vector<GoalCondition> c;
    switch (type) {
        case TaskType::PickPlace: c = {{K::Picked, S::Object}, {K::Placed, S::Object}}; break;
        case TaskType::StackPlace: c = {{K::Picked, S::Object}, {K::Stacked, S::Object}, {K::BasePlaced, S::Base}}; break;
        case TaskType::PickTwoPlace:
            c = {{K::Picked, S::Object}, {K::Picked, S::Object2}, {K::Placed, S::Object}, {K::Placed, S::Object2}};
            break;
        case TaskType::CleanPlace: c = {{K::Cleaned, S::Object}, {K::Placed, S::Object}}; break;
        case TaskType::HeatPlace: c = {{K::Heated, S::Object}, {K::Placed, S::Object}}; break;
        case TaskType::CoolPlace: c = {{K::Cooled, S::Object}, {K::Placed, S::Object}}; break;
        case TaskType::ExamineInLight: c = {{K::Holding, S::Object}, {K::LightOn, S::Lamp}}; break;
    }
    if (sliced) c.push_back({K::Sliced, S::Object});
    return c;
}

GoalStatus check_goal(const WorldState& s, const GoalSpec& goals) {
    std::array<bool, 4> used{};
    for (const auto& c : goals.conditions) {
        used[static_cast<std::size_t>(c.slot)] = true;
        if (c.kind == GoalKind::Stacked) used[static_cast<std::size_t>(GoalSlot::Base)] = true;
    }
    const std::array<const std::string*, 4> slot_class = {&goals.targets.object, &goals.targets.object,
                                                          &goals.targets.base, &goals.targets.lamp};
    std::array<std::vector<int>, 4> candidates;
    for (std::size_t slot = 0; slot < 4; ++slot) {
        if (!used[slot]) continue;
        for (std::size_t i = 0; i < s.object_count(); ++i)
            if (class_name(s.info(static_cast<ObjectIndex>(i)).cls) == *slot_class[slot])
                candidates[slot].push_back(static_cast<int>(i));
        candidates[slot].push_back(-1);  // slot left unassigned
    }

    int best = 0;
    std::array<int, 4> slots{-1, -1, -1, -1};
    std::function<void(std::size_t)> assign = [&](std::size_t slot) {
        if (slot == 4) {
            int n = 0;
            for (const auto& c : goals.conditions) n += holds(s, goals, c, slots) ? 1 : 0;
            best = std::max(best, n);
            return;
        }
        if (!used[slot]) {
            assign(slot + 1);
            return;
        }
        for (int cand : candidates[slot]) {
            if (cand >= 0 && std::find(slots.begin(), slots.begin() + static_cast<long>(slot), cand) !=
                                 slots.begin() + static_cast<long>(slot))
                continue;
            slots[slot] = cand;
            assign(slot + 1);
            slots[slot] = -1;
        }
    };
    assign(0);

    GoalStatus st;
    st.total = static_cast<int>(goals.conditions.size());
    st.satisfied = best;
    st.success = st.total > 0 && best == st.total;
    return st;
}

}  // namespace opex::sim
