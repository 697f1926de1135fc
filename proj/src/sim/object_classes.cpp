#include "opex/sim/object_classes.hpp"

#include <array>
#include <stdexcept>

namespace opex::sim {
namespace {

constexpr ClassTraits fixture(std::string_view name, std::string_view display) {
    ClassTraits t{};
    t.name = name;
    t.display = display;
    t.fixture = true;
    return t;
}

constexpr ClassTraits receptacle_fixture(std::string_view name, std::string_view display, bool openable) {
    ClassTraits t = fixture(name, display);
    t.receptacle = true;
    t.openable = openable;
    return t;
}

constexpr ClassTraits item(std::string_view name, std::string_view display) {
    ClassTraits t{};
    t.name = name;
    t.display = display;
    t.pickupable = true;
    return t;
}

constexpr auto make_table() {
    std::array<ClassTraits, 48> t{};
    std::size_t i = 0;
    t[i++] = receptacle_fixture("CounterTop", "counter", false);
    t[i++] = receptacle_fixture("DiningTable", "dining table", false);
    t[i++] = receptacle_fixture("SideTable", "side table", false);
    t[i++] = receptacle_fixture("Desk", "desk", false);
    t[i++] = receptacle_fixture("Shelf", "shelf", false);
    t[i++] = receptacle_fixture("Cabinet", "cabinet", true);
    t[i++] = receptacle_fixture("Drawer", "drawer", true);
    t[i++] = receptacle_fixture("Box", "box", true);
    t[i++] = receptacle_fixture("GarbageCan", "garbage can", false);
    t[i++] = receptacle_fixture("SinkBasin", "sink", false);
    {
        ClassTraits f = receptacle_fixture("Fridge", "fridge", true);
        f.cools_contents = true;
        t[i++] = f;
    }
    {
        ClassTraits m = receptacle_fixture("Microwave", "microwave", true);
        m.toggleable = true;
        m.heats_contents = true;
        t[i++] = m;
    }
    {
        ClassTraits f{};
        f.name = "Faucet";
        f.display = "faucet";
        f.toggleable = true;
        f.cleans_container = true;
        t[i++] = f;
    }
    {
        ClassTraits l{};
        l.name = "DeskLamp";
        l.display = "desk lamp";
        l.toggleable = true;
        l.light_source = true;
        t[i++] = l;
    }
    {
        ClassTraits l = fixture("FloorLamp", "floor lamp");
        l.toggleable = true;
        l.light_source = true;
        t[i++] = l;
    }
    for (auto [name, display] : {std::pair<std::string_view, std::string_view>{"Bowl", "bowl"},
                                 {"Plate", "plate"},
                                 {"Pan", "pan"},
                                 {"Pot", "pot"}}) {
        ClassTraits r = item(name, display);
        r.receptacle = true;
        t[i++] = r;
    }
    for (auto [name, display] : {std::pair<std::string_view, std::string_view>{"Apple", "apple"},
                                 {"Tomato", "tomato"},
                                 {"Bread", "bread"},
                                 {"Potato", "potato"},
                                 {"Lettuce", "lettuce"}}) {
        ClassTraits s = item(name, display);
        s.sliceable = true;
        t[i++] = s;
    }
    for (auto [name, display] : {std::pair<std::string_view, std::string_view>{"Knife", "knife"},
                                 {"ButterKnife", "butter knife"}}) {
        ClassTraits k = item(name, display);
        k.slicer = true;
        t[i++] = k;
    }
    for (auto [name, display] : {std::pair<std::string_view, std::string_view>{"Mug", "mug"},
                                 {"Cup", "cup"},
                                 {"Egg", "egg"},
                                 {"Spoon", "spoon"},
                                 {"Fork", "fork"},
                                 {"Book", "book"},
                                 {"CellPhone", "cell phone"},
                                 {"KeyChain", "key chain"},
                                 {"Pencil", "pencil"},
                                 {"Watch", "watch"},
                                 {"CreditCard", "credit card"},
                                 {"Vase", "vase"},
                                 {"Candle", "candle"},
                                 {"SoapBar", "soap bar"},
                                 {"Sponge", "sponge"}}) {
        t[i++] = item(name, display);
    }
    for (auto [name, display] : {std::pair<std::string_view, std::string_view>{kWallLabel, "wall"},
                                 {kFloorLabel, "floor"}}) {
        ClassTraits s{};
        s.name = name;
        s.display = display;
        s.structural = true;
        t[i++] = s;
    }
    return std::pair{t, i};
}

constexpr auto kTable = make_table();

}  // namespace

std::span<const ClassTraits> all_classes() { return {kTable.first.data(), kTable.second}; }

std::optional<ClassId> find_class(std::string_view name) {
    const auto classes = all_classes();
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].name == name) return static_cast<ClassId>(i);
    return std::nullopt;
}

const ClassTraits& traits(ClassId id) {
    const auto classes = all_classes();
    if (id >= classes.size()) throw std::out_of_range("unknown class id");
    return classes[id];
}

ClassId wall_class() {
    static const ClassId id = *find_class(kWallLabel);
    return id;
}

ClassId floor_class() {
    static const ClassId id = *find_class(kFloorLabel);
    return id;
}

ClassId require_class(std::string_view name) {
    auto id = find_class(name);
    if (!id) throw std::invalid_argument("unknown object class: " + std::string(name));
    return *id;
}

}  // namespace opex::sim
