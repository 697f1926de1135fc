#include "opex/sim/scenario.hpp"

#include <fstream>
#include <map>
#include <set>

#include "opex/common/hashing.hpp"
#include "opex/common/text.hpp"

namespace opex::sim {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ScenarioError(path + key, "missing field");
    return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_string()) throw ScenarioError(path + key, "expected a string");
    return v.get<std::string>();
}

Cell cell_field(const json& v, const std::string& path, const Grid& grid) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ScenarioError(path, "expected [row, col]");
    const Cell c{v[0].get<int>(), v[1].get<int>()};
    if (!grid.in_bounds(c)) throw ScenarioError(path, "cell out of bounds");
    return c;
}

ClassId class_field(const json& obj, const std::string& path) {
    const std::string name = string_field(obj, "class", path);
    auto id = find_class(name);
    if (!id || traits(*id).structural) throw ScenarioError(path + "class", "unknown object class: " + name);
    return *id;
}

Grid parse_grid(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw ScenarioError("grid", "expected a non-empty list of rows");
    const int h = static_cast<int>(rows.size());
    int w = -1;
    std::vector<Terrain> cells;
    for (int r = 0; r < h; ++r) {
        if (!rows[r].is_string()) throw ScenarioError("grid", "rows must be strings");
        const auto row = rows[r].get<std::string>();
        if (w < 0) w = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != w || w == 0) throw ScenarioError("grid", "rows must share one non-zero width");
        for (char ch : row) {
            if (ch == '#') cells.push_back(Terrain::Wall);
            else if (ch == '.' || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z')) cells.push_back(Terrain::Floor);
            else throw ScenarioError("grid", std::string("unknown cell code '") + ch + "'");
        }
    }
    return Grid(h, w, std::move(cells));
}

ObjectFlags parse_flags(const json& f, const std::string& path) {
    ObjectFlags flags;
    if (f.is_null()) return flags;
    if (!f.is_object()) throw ScenarioError(path, "expected an object");
    for (const auto& [k, v] : f.items()) {
        if (!v.is_boolean()) throw ScenarioError(path + "." + k, "expected a boolean");
        const bool b = v.get<bool>();
        if (k == "clean") flags.clean = b;
        else if (k == "hot") flags.hot = b;
        else if (k == "cold") flags.cold = b;
        else if (k == "sliced") flags.sliced = b;
        else if (k == "toggled_on") flags.toggled_on = b;
        else throw ScenarioError(path + "." + k, "unknown flag");
    }
    return flags;
}

ObjectId make_handle(std::size_t index) { return mix64(0x6f7065785f6f626aULL, index) | 1ULL; }

Scenario load_impl(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("<root>", "expected an object");
    Scenario sc;
    sc.name = string_field(doc, "name", "");
    sc.room_type = doc.value("room_type", std::string("room"));

    auto layout = std::make_shared<Layout>();
    layout->grid = parse_grid(field(doc, "grid", ""));
    if (doc.contains("view_distance")) layout->view_distance = doc.at("view_distance").get<int>();
    const Grid& grid = layout->grid;

    WorldState& st = sc.initial;
    std::map<std::string, ObjectIndex> by_name;
    std::vector<std::pair<ObjectIndex, std::string>> pending_inside;
    std::set<Cell> occupied;

    auto add_object = [&](const json& o, const std::string& path, bool fixture_list) {
        ObjectStatic info;
        info.name = string_field(o, "id", path);
        info.cls = class_field(o, path);
        if (by_name.count(info.name)) throw ScenarioError(path + "id", "duplicate id " + info.name);
        const ClassTraits& tr = traits(info.cls);
        if (fixture_list && !tr.receptacle) throw ScenarioError(path + "class", "not a receptacle class");
        info.openable = o.value("openable", tr.openable);
        if (o.contains("elevation")) {
            auto e = parse_elevation(o.at("elevation").get<std::string>());
            if (!e) throw ScenarioError(path + "elevation", "expected low, mid or high");
            info.elevation = *e;
        }
        const auto idx = static_cast<ObjectIndex>(layout->objects.size());
        info.handle = make_handle(idx);
        ObjectState s;
        s.flags = parse_flags(o.value("flags", json()), path + "flags");
        s.open = o.value("open", !info.openable);
        if (o.contains("in")) {
            pending_inside.emplace_back(idx, o.at("in").get<std::string>());
        } else {
            const Cell c = cell_field(field(o, "cell", path), path + "cell", grid);
            if (grid.is_wall(c)) throw ScenarioError(path + "cell", "object on a wall cell");
            if (!occupied.insert(c).second) throw ScenarioError(path + "cell", "cell already occupied");
            s.location = Location::at(c);
        }
        by_name[info.name] = idx;
        layout->objects.push_back(std::move(info));
        st.objects.push_back(s);
    };

    if (doc.contains("receptacles")) {
        const json& recs = doc.at("receptacles");
        for (std::size_t i = 0; i < recs.size(); ++i)
            add_object(recs[i], "receptacles[" + std::to_string(i) + "].", true);
    }
    const json& objs = field(doc, "objects", "");
    for (std::size_t i = 0; i < objs.size(); ++i) add_object(objs[i], "objects[" + std::to_string(i) + "].", false);
    if (layout->objects.size() > 4096) throw ScenarioError("objects", "too many objects");

    for (const auto& [idx, container] : pending_inside) {
        const std::string path = "objects." + layout->objects[idx].name + ".in";
        const auto it = by_name.find(container);
        if (it == by_name.end()) throw ScenarioError(path, "unknown container " + container);
        if (!traits(layout->objects[it->second].cls).receptacle) throw ScenarioError(path, container + " is not a receptacle");
        st.objects[idx].location = Location::inside(it->second);
    }
    st.layout = layout;
    for (std::size_t i = 0; i < st.object_count(); ++i) {
        // Walk to the root with a bound so cycles are reported instead of looping.
        auto j = static_cast<ObjectIndex>(i);
        std::size_t hops = 0;
        while (st.objects[j].location.kind == Location::Kind::Inside) {
            j = st.objects[j].location.container;
            if (++hops > st.object_count())
                throw ScenarioError("objects." + layout->objects[i].name + ".in", "containment cycle");
        }
    }

    const json& agent = field(doc, "agent", "");
    const Cell ac = cell_field(field(agent, "cell", "agent."), "agent.cell", grid);
    if (st.blocked(ac)) throw ScenarioError("agent.cell", "agent not on traversable cell");
    st.agent.cell = ac;
    if (agent.contains("heading")) {
        auto h = parse_heading(agent.at("heading").get<std::string>());
        if (!h) throw ScenarioError("agent.heading", "expected N, E, S or W");
        st.agent.heading = *h;
    }
    if (agent.contains("pitch")) {
        auto p = parse_pitch(agent.at("pitch").get<std::string>());
        if (!p) throw ScenarioError("agent.pitch", "expected down, level or up");
        st.agent.pitch = *p;
    }

    const json& task = field(doc, "task", "");
    const std::string type_name = string_field(task, "type", "task.");
    const auto type = parse_task_type(type_name);
    if (!type) throw ScenarioError("task.type", "unknown task type " + type_name);
    sc.task.type = *type;
    sc.task.high_level = string_field(task, "high_level", "task.");
    if (text::trim(sc.task.high_level).empty()) throw ScenarioError("task.high_level", "must be non-empty");
    if (task.contains("low_level")) sc.task.low_level = task.at("low_level").get<std::vector<std::string>>();
    const json& targets = field(task, "targets", "task.");
    sc.goals.targets.object = targets.value("object", std::string());
    sc.goals.targets.receptacle = targets.value("receptacle", std::string());
    sc.goals.targets.base = targets.value("base", std::string());
    sc.goals.targets.lamp = targets.value("lamp", std::string());
    sc.goals.targets.sliced = task.value("sliced", false);

    if (doc.contains("goals")) {
        const json& goals = doc.at("goals");
        if (!goals.is_array()) throw ScenarioError("goals", "expected a list");
        for (std::size_t i = 0; i < goals.size(); ++i) {
            const std::string path = "goals[" + std::to_string(i) + "].";
            auto kind = parse_goal_kind(string_field(goals[i], "kind", path));
            if (!kind) throw ScenarioError(path + "kind", "unknown goal kind");
            auto slot = parse_goal_slot(goals[i].value("slot", std::string("object")));
            if (!slot) throw ScenarioError(path + "slot", "unknown goal slot");
            sc.goals.conditions.push_back({*kind, *slot});
        }
    } else {
        sc.goals.conditions = default_conditions(sc.task.type, sc.goals.targets.sliced);
    }
    if (sc.goals.conditions.empty()) throw ScenarioError("goals", "total ≥ 1 violated");

    auto check_target = [&](const std::string& name, const char* key, bool needed) {
        if (!needed) return;
        if (name.empty()) throw ScenarioError(std::string("task.targets.") + key, "missing field");
        if (!find_class(name)) throw ScenarioError(std::string("task.targets.") + key, "unknown object class: " + name);
    };
    bool need_rec = false, need_base = false, need_lamp = false;
    for (const auto& c : sc.goals.conditions) {
        need_rec |= c.kind == GoalKind::Placed || c.kind == GoalKind::BasePlaced;
        need_base |= c.slot == GoalSlot::Base || c.kind == GoalKind::Stacked;
        need_lamp |= c.slot == GoalSlot::Lamp;
    }
    check_target(sc.goals.targets.object, "object", true);
    check_target(sc.goals.targets.receptacle, "receptacle", need_rec);
    check_target(sc.goals.targets.base, "base", need_base);
    check_target(sc.goals.targets.lamp, "lamp", need_lamp);

    if (check_goal(st, sc.goals).satisfied > 0) throw ScenarioError("goals", "goal condition satisfied in the initial state");

    if (doc.contains("noise")) {
        const json& n = doc.at("noise");
        sc.noise.mislabel = n.value("mislabel", 0.0);
        sc.noise.drop = n.value("drop", 0.0);
        if (sc.noise.mislabel < 0 || sc.noise.mislabel > 1) throw ScenarioError("noise.mislabel", "must lie in [0, 1]");
        if (sc.noise.drop < 0 || sc.noise.drop > 1) throw ScenarioError("noise.drop", "must lie in [0, 1]");
        if (n.contains("confusion")) {
            for (const auto& [from, tos] : n.at("confusion").items()) {
                auto f = find_class(from);
                if (!f) throw ScenarioError("noise.confusion", "unknown object class: " + from);
                for (const auto& to : tos) {
                    auto t = find_class(to.get<std::string>());
                    if (!t) throw ScenarioError("noise.confusion", "unknown object class: " + to.get<std::string>());
                    sc.noise.confusion[*f].push_back(*t);
                }
            }
        }
    }
    sc.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("limits")) {
        sc.limits.max_steps = doc.at("limits").value("max_steps", sc.limits.max_steps);
        sc.limits.max_failures = doc.at("limits").value("max_failures", sc.limits.max_failures);
    }
    return sc;
}

}  // namespace

Scenario load_scenario(const json& doc) {
    try {
        return load_impl(doc);
    } catch (const json::exception& e) {
        throw ScenarioError("<root>", std::string("malformed value: ") + e.what());
    }
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return load_scenario(doc);
}

}  // namespace opex::sim
