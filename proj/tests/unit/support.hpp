#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opex/sim/scenario.hpp"

namespace testsupport {

using nlohmann::json;

// Independent SplitMix64, used to replay seeded streams without the library's helpers.
inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::vector<std::string> open_room(int rows, int cols) {
    std::vector<std::string> g;
    for (int r = 0; r < rows; ++r) {
        std::string row;
        for (int c = 0; c < cols; ++c) row.push_back(r == 0 || c == 0 || r == rows - 1 || c == cols - 1 ? '#' : '.');
        g.push_back(row);
    }
    return g;
}

inline json cell(int r, int c) { return json::array({r, c}); }

// 5x5 room (3x3 interior), counter at (1,1) holding a mug, cabinet at (1,3), agent at (3,2)
// facing north.
inline json minimal_pick_place() {
    json doc;
    doc["name"] = "minimal";
    doc["room_type"] = "kitchen";
    doc["grid"] = open_room(5, 5);
    doc["receptacles"] = json::array({
        {{"id", "countertop_1"}, {"class", "CounterTop"}, {"cell", cell(1, 1)}},
        {{"id", "cabinet_1"}, {"class", "Cabinet"}, {"cell", cell(1, 3)}, {"open", true}},
    });
    doc["objects"] = json::array({{{"id", "mug_1"}, {"class", "Mug"}, {"in", "countertop_1"}}});
    doc["agent"] = {{"cell", cell(3, 2)}, {"heading", "N"}, {"pitch", "level"}};
    doc["task"] = {{"type", "Pick&Place"},
                   {"high_level", "put a mug in the cabinet"},
                   {"low_level", json::array({"pick up the mug", "put it in the cabinet"})},
                   {"targets", {{"object", "Mug"}, {"receptacle", "Cabinet"}}}};
    doc["seed"] = 1;
    return doc;
}

inline opex::sim::LowLevelAction act(opex::sim::ActionKind k) { return {k, std::nullopt}; }

inline opex::sim::LowLevelAction act(opex::sim::ActionKind k, const opex::sim::WorldState& s, const std::string& name) {
    return {k, s.info(*s.find_by_name(name)).handle};
}

}  // namespace testsupport
