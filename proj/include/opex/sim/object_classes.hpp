#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace opex::sim {

using ClassId = std::uint16_t;

// What an object class can do. Fixture classes occupy a grid cell and block movement.
struct ClassTraits {
    std::string_view name;
    std::string_view display;  // lower-case words used in instructions
    bool fixture = false;
    bool pickupable = false;
    bool receptacle = false;
    bool openable = false;
    bool toggleable = false;
    bool sliceable = false;
    bool slicer = false;
    bool light_source = false;
    bool heats_contents = false;   // toggling on heats what is inside
    bool cools_contents = false;   // closing the door cools what is inside
    bool cleans_container = false; // toggling on cleans the objects sharing its container
    bool structural = false;       // Wall and Floor: perception labels for bare cells
};

inline constexpr std::string_view kWallLabel = "Wall";
inline constexpr std::string_view kFloorLabel = "Floor";

std::span<const ClassTraits> all_classes();
std::optional<ClassId> find_class(std::string_view name);
const ClassTraits& traits(ClassId id);
inline std::string_view class_name(ClassId id) { return traits(id).name; }

ClassId require_class(std::string_view name);
ClassId wall_class();
ClassId floor_class();

// Any label other than Floor marks its cell as impassable.
inline bool label_blocks(ClassId id) { return id != floor_class(); }

}  // namespace opex::sim
