#include "opex/harness/generator.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "opex/common/text.hpp"
#include "opex/harness/runner.hpp"
#include "opex/sim/object_classes.hpp"

namespace opex::harness {

using nlohmann::json;

namespace {

using Rng = std::mt19937_64;

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[rng() % v.size()];
}

std::string display(const std::string& cls) { return std::string(sim::traits(*sim::find_class(cls)).display); }

std::string prep(const std::string& cls) {
    const auto& t = sim::traits(*sim::find_class(cls));
    return t.openable || cls == "SinkBasin" || cls == "GarbageCan" ? "in" : "on";
}

std::string plural(const std::string& word) {
    if (!word.empty() && (word.back() == 's' || word.back() == 'h')) return word + "es";
    return word + "s";
}

const std::vector<std::string> kSurfaces = {"CounterTop", "DiningTable", "SideTable", "Desk", "Shelf"};
const std::vector<std::string> kPlaceTargets = {"Cabinet", "Drawer", "Box", "CounterTop", "DiningTable", "SideTable",
                                                "Shelf", "Desk", "GarbageCan"};

struct Builder {
    Rng rng;
    LayoutStyle style;
    int rows = 0, cols = 0;
    std::vector<std::string> grid;
    std::vector<std::pair<int, int>> slots;  // free fixture cells, in use order
    std::size_t next_slot = 0;
    json receptacles = json::array();
    json objects = json::array();
    std::map<std::string, int> counts;
    std::map<std::string, std::string> fixture_of_class;  // first fixture id per class

    std::string class_of(const std::string& id) const {
        for (const auto& f : receptacles)
            if (f["id"] == id) return f["class"].get<std::string>();
        throw std::logic_error("no fixture " + id);
    }

    std::string id_for(const std::string& cls) { return text::to_lower(cls) + "_" + std::to_string(++counts[cls]); }

    std::pair<int, int> take_slot() {
        if (next_slot >= slots.size()) throw std::logic_error("generator ran out of fixture cells");
        return slots[next_slot++];
    }

    // A new fixture of `cls`, closed when openable unless asked otherwise.
    std::string fixture(const std::string& cls, std::optional<bool> open = std::nullopt) {
        const auto [r, c] = take_slot();
        const std::string id = id_for(cls);
        json f = {{"id", id}, {"class", cls}, {"cell", json::array({r, c})}};
        if (open) f["open"] = *open;
        receptacles.push_back(f);
        fixture_of_class.emplace(cls, id);
        return id;
    }

    std::string fixture_once(const std::string& cls, std::optional<bool> open = std::nullopt) {
        const auto it = fixture_of_class.find(cls);
        return it != fixture_of_class.end() ? it->second : fixture(cls, open);
    }

    std::string item(const std::string& cls, const std::string& in) {
        const std::string id = id_for(cls);
        objects.push_back({{"id", id}, {"class", cls}, {"in", in}});
        return id;
    }

    // A surface other than the excluded classes, reusing one when there is one.
    std::string surface(const std::set<std::string>& exclude) {
        std::vector<std::string> options;
        for (const auto& s : kSurfaces)
            if (!exclude.count(s)) options.push_back(s);
        if (next_slot >= slots.size()) {
            // Out of wall space: reuse a surface that is already there.
            std::vector<std::string> existing;
            for (const auto& s : options)
                if (fixture_of_class.count(s)) existing.push_back(fixture_of_class.at(s));
            if (!existing.empty()) return pick(rng, existing);
        }
        return fixture_once(pick(rng, options));
    }
};

void build_room(Builder& b, int rows, int cols, bool partition) {
    b.rows = rows;
    b.cols = cols;
    for (int r = 0; r < rows; ++r) {
        std::string row;
        for (int c = 0; c < cols; ++c) row.push_back(r == 0 || c == 0 || r == rows - 1 || c == cols - 1 ? '#' : '.');
        b.grid.push_back(row);
    }
    if (b.style == LayoutStyle::Showcase) {
        // North wall, every other column, away from the corners.
        for (int c = 2; c < cols - 2; c += 2) b.slots.push_back({1, c});
        return;
    }
    if (partition) {
        // A wall across the middle rows with a two-cell doorway.
        const int wc = cols / 2;
        const int door = 2 + static_cast<int>(b.rng() % (rows - 5));
        for (int r = 1; r < rows - 1; ++r)
            if (r != door && r != door + 1) b.grid[r][wc] = '#';
    }
    std::vector<std::pair<int, int>> wall_cells;
    for (int c = 2; c < cols - 2; c += 2) {
        wall_cells.push_back({1, c});
        wall_cells.push_back({rows - 2, c});
    }
    for (int r = 3; r < rows - 3; r += 2) {
        wall_cells.push_back({r, 1});
        wall_cells.push_back({r, cols - 2});
    }
    // Fixture cells must not touch the partition.
    wall_cells.erase(std::remove_if(wall_cells.begin(), wall_cells.end(),
                                    [&](auto rc) {
                                        const int c = rc.second;
                                        return b.grid[rc.first][c] == '#' || (c > 0 && b.grid[rc.first][c - 1] == '#' && c - 1 != 0) ||
                                               (c + 1 < cols - 1 && b.grid[rc.first][c + 1] == '#');
                                    }),
                     wall_cells.end());
    for (std::size_t i = wall_cells.size(); i > 1; --i) std::swap(wall_cells[i - 1], wall_cells[b.rng() % i]);
    b.slots = wall_cells;
}

const std::map<std::string, std::string> kConfusable = {
    {"Mug", "Cup"},        {"Cup", "Mug"},     {"Apple", "Tomato"}, {"Tomato", "Apple"}, {"Bowl", "Plate"},
    {"Plate", "Bowl"},     {"Pot", "Pan"},     {"Pan", "Pot"},      {"Spoon", "Fork"},   {"Fork", "Spoon"},
    {"Egg", "Potato"},     {"Potato", "Egg"},  {"Bread", "Lettuce"}, {"Lettuce", "Bread"}, {"CellPhone", "CreditCard"},
    {"CreditCard", "CellPhone"}, {"KeyChain", "Watch"}, {"Watch", "KeyChain"}, {"Vase", "Candle"}, {"Candle", "Vase"},
    {"Book", "Pencil"},    {"Pencil", "Book"}, {"SoapBar", "Sponge"}, {"Sponge", "SoapBar"},
};

}  // namespace

json generate_scenario(const GeneratorOptions& opt, const std::string& name) {
    Builder b;
    b.rng.seed(opt.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(opt.type) + 1);
    b.style = opt.style;
    const bool cluttered = opt.style == LayoutStyle::Cluttered;
    const int rows = cluttered ? 10 + static_cast<int>(b.rng() % 3) : 8;
    const int cols = cluttered ? 11 + static_cast<int>(b.rng() % 3) : 13;
    build_room(b, rows, cols, cluttered && b.rng() % 2 == 0);

    using sim::TaskType;
    json targets;
    std::string task;
    std::string room = "kitchen";
    std::vector<std::string> goal_objects;
    std::string obj;

    auto place_target = [&](const std::set<std::string>& exclude) {
        std::vector<std::string> options;
        for (const auto& r : kPlaceTargets)
            if (!exclude.count(r)) options.push_back(r);
        return pick(b.rng, options);
    };
    // Sliced tasks keep the fruit and the knife together on a counter, as kitchens do.
    auto sliced_prefix = [&](const std::string& o, const std::string& at) {
        if (!opt.sliced) return;
        if (!sim::traits(*sim::find_class(o)).sliceable) throw std::invalid_argument("sliced task needs a sliceable object");
        b.item("Knife", at);
    };

    switch (opt.type) {
        case TaskType::PickPlace: {
            obj = opt.sliced ? pick(b.rng, std::vector<std::string>{"Apple", "Tomato", "Bread", "Potato", "Lettuce"})
                             : pick(b.rng, std::vector<std::string>{"Mug", "Cup", "Book", "CellPhone", "KeyChain", "Pencil",
                                                                    "Watch", "CreditCard", "Vase", "Candle", "SoapBar", "Egg"});
            const std::string src = opt.sliced ? b.fixture_once("CounterTop") : b.surface({});
            const std::string recep = place_target({b.class_of(src)});
            b.fixture_once(recep);
            b.item(obj, src);
            sliced_prefix(obj, src);
            targets = {{"object", obj}, {"receptacle", recep}};
            task = std::string(opt.sliced ? "put a slice of " : "put a ") + display(obj) + " " + prep(recep) + " the " + display(recep);
            break;
        }
        case TaskType::StackPlace: {
            obj = pick(b.rng, std::vector<std::string>{"Spoon", "Fork", "Egg", "Apple", "Potato", "Tomato"});
            const std::string base = pick(b.rng, std::vector<std::string>{"Bowl", "Plate", "Pot", "Pan"});
            const std::string src = b.surface({});
            const std::string recep = place_target({"Drawer", "Box", "GarbageCan"});
            b.fixture_once(recep);
            b.item(obj, src);
            b.item(base, b.surface({recep}));
            targets = {{"object", obj}, {"receptacle", recep}, {"base", base}};
            task = "put a " + display(base) + " with a " + display(obj) + " in it " + prep(recep) + " the " + display(recep);
            break;
        }
        case TaskType::PickTwoPlace: {
            obj = pick(b.rng, std::vector<std::string>{"Mug", "Cup", "Book", "CellPhone", "KeyChain", "Pencil", "Watch",
                                                       "CreditCard", "Candle", "SoapBar"});
            const std::string recep = place_target({});
            b.fixture_once(recep);
            b.item(obj, b.surface({recep}));
            b.item(obj, b.surface({recep}));
            targets = {{"object", obj}, {"receptacle", recep}};
            task = "put two " + plural(display(obj)) + " " + prep(recep) + " the " + display(recep);
            break;
        }
        case TaskType::CleanPlace:
        case TaskType::HeatPlace:
        case TaskType::CoolPlace: {
            std::vector<std::string> pool;
            std::string appliance, adjective;
            if (opt.type == TaskType::CleanPlace) {
                pool = {"Mug", "Cup", "Bowl", "Plate", "Spoon", "Fork", "Apple", "Tomato"};
                appliance = "SinkBasin";
                adjective = "clean";
            } else if (opt.type == TaskType::HeatPlace) {
                pool = {"Mug", "Cup", "Egg", "Potato", "Apple", "Bread"};
                appliance = "Microwave";
                adjective = "hot";
            } else {
                pool = {"Apple", "Tomato", "Lettuce", "Egg", "Mug", "Cup", "Potato"};
                appliance = "Fridge";
                adjective = "cold";
            }
            obj = opt.sliced ? pick(b.rng, std::vector<std::string>{"Apple", "Tomato", "Potato", "Bread"}) : pick(b.rng, pool);
            if (opt.type == TaskType::CleanPlace && opt.sliced) obj = "Apple";
            const std::string app = b.fixture(appliance);
            if (appliance == "SinkBasin") b.item("Faucet", app);
            const std::string recep = place_target({appliance, opt.sliced ? "CounterTop" : ""});
            b.fixture_once(recep);
            const std::string src = opt.sliced ? b.fixture_once("CounterTop") : b.surface({recep});
            b.item(obj, src);
            sliced_prefix(obj, src);
            targets = {{"object", obj}, {"receptacle", recep}};
            task = "put a " + adjective + " " + std::string(opt.sliced ? "slice of " : "") + display(obj) + " " + prep(recep) +
                   " the " + display(recep);
            break;
        }
        case TaskType::ExamineInLight: {
            room = "bedroom";
            obj = pick(b.rng, std::vector<std::string>{"Book", "CellPhone", "KeyChain", "Pencil", "Watch", "CreditCard", "Vase",
                                                       "Candle"});
            const bool floor = b.rng() % 2 == 0;
            std::string lamp;
            if (floor) {
                lamp = "FloorLamp";
                const auto [r, c] = b.take_slot();
                b.objects.push_back({{"id", b.id_for(lamp)}, {"class", lamp}, {"cell", json::array({r, c})}});
            } else {
                lamp = "DeskLamp";
                b.item(lamp, b.fixture_once(pick(b.rng, std::vector<std::string>{"Desk", "SideTable"})));
            }
            b.item(obj, b.surface({}));
            targets = {{"object", obj}, {"lamp", lamp}};
            task = "examine the " + display(obj) + " under the " + display(lamp);
            break;
        }
    }

    // Distractors: something confusable with the goal object when noise is on, else filler.
    const std::vector<std::string> filler = {"Spoon", "Fork", "Pencil", "Sponge", "Watch", "Candle", "KeyChain"};
    for (int i = 0; i < opt.distractors; ++i) {
        std::string cls;
        const auto conf = kConfusable.find(obj);
        if (cluttered && i == 0 && conf != kConfusable.end()) cls = conf->second;
        else cls = pick(b.rng, filler);
        if (cls == obj) continue;
        b.item(cls, b.surface({}));
    }

    json doc;
    doc["name"] = name;
    doc["room_type"] = room;
    doc["grid"] = b.grid;
    doc["view_distance"] = cluttered ? 5 : 10;
    doc["receptacles"] = b.receptacles;
    doc["objects"] = b.objects;
    if (cluttered) {
        // Random free cell and heading.
        std::vector<std::pair<int, int>> free;
        std::set<std::pair<int, int>> used;
        for (const auto& f : b.receptacles) used.insert({f["cell"][0].get<int>(), f["cell"][1].get<int>()});
        for (const auto& o : b.objects)
            if (o.contains("cell")) used.insert({o["cell"][0].get<int>(), o["cell"][1].get<int>()});
        for (int r = 2; r < rows - 2; ++r)
            for (int c = 2; c < cols - 2; ++c)
                if (b.grid[r][c] == '.' && !used.count({r, c})) free.push_back({r, c});
        const auto [ar, ac] = pick(b.rng, free);
        doc["agent"] = {{"cell", json::array({ar, ac})}, {"heading", pick(b.rng, std::vector<std::string>{"N", "E", "S", "W"})},
                        {"pitch", "level"}};
    } else {
        doc["agent"] = {{"cell", json::array({rows - 2, cols / 2})}, {"heading", "N"}, {"pitch", "level"}};
    }
    json task_doc = {{"type", std::string(sim::to_string(opt.type))}, {"high_level", task}, {"targets", targets}};
    if (opt.sliced) task_doc["sliced"] = true;
    doc["task"] = task_doc;
    doc["seed"] = opt.seed;
    if (opt.mislabel > 0) {
        json confusion = json::object();
        for (const auto& [from, tos] : default_confusion()) {
            json list = json::array();
            for (auto t : tos) list.push_back(std::string(sim::class_name(t)));
            confusion[std::string(sim::class_name(from))] = list;
        }
        doc["noise"] = {{"mislabel", opt.mislabel}, {"confusion", confusion}};
    }
    return doc;
}

}  // namespace opex::harness
