#include "opex/sim/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace opex::sim {

Egocentric to_egocentric(Cell origin, Heading h, Cell target) {
    const int dr = target.row - origin.row;
    const int dc = target.col - origin.col;
    switch (h) {
        case Heading::North: return {-dr, dc};
        case Heading::East: return {dc, dr};
        case Heading::South: return {dr, -dc};
        case Heading::West: return {-dc, -dr};
    }
    return {};
}

std::string_view to_string(Heading h) {
    switch (h) {
        case Heading::North: return "N";
        case Heading::East: return "E";
        case Heading::South: return "S";
        case Heading::West: return "W";
    }
    return "?";
}

std::string_view to_string(Pitch p) {
    switch (p) {
        case Pitch::Down: return "down";
        case Pitch::Level: return "level";
        case Pitch::Up: return "up";
    }
    return "?";
}

std::string_view to_string(Elevation e) {
    switch (e) {
        case Elevation::Low: return "low";
        case Elevation::Mid: return "mid";
        case Elevation::High: return "high";
    }
    return "?";
}

std::optional<Heading> parse_heading(std::string_view s) {
    if (s == "N") return Heading::North;
    if (s == "E") return Heading::East;
    if (s == "S") return Heading::South;
    if (s == "W") return Heading::West;
    return std::nullopt;
}

std::optional<Pitch> parse_pitch(std::string_view s) {
    if (s == "down") return Pitch::Down;
    if (s == "level") return Pitch::Level;
    if (s == "up") return Pitch::Up;
    return std::nullopt;
}

std::optional<Elevation> parse_elevation(std::string_view s) {
    if (s == "low") return Elevation::Low;
    if (s == "mid") return Elevation::Mid;
    if (s == "high") return Elevation::High;
    return std::nullopt;
}

Grid::Grid(int rows, int cols, std::vector<Terrain> cells) : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows <= 0 || cols <= 0 || cells_.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("grid dimensions do not match cell count");
}

std::size_t CellMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

}  // namespace opex::sim
