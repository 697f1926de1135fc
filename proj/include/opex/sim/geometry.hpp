#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opex::sim {

struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

enum class Heading : std::uint8_t { North, East, South, West };
enum class Pitch : std::uint8_t { Down, Level, Up };
enum class Elevation : std::uint8_t { Low, Mid, High };

constexpr Heading turn_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
constexpr Heading turn_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }

constexpr Cell offset(Heading h) {
    switch (h) {
        case Heading::North: return {-1, 0};
        case Heading::East: return {0, 1};
        case Heading::South: return {1, 0};
        case Heading::West: return {0, -1};
    }
    return {0, 0};
}

constexpr Cell ahead(Cell c, Heading h) {
    const Cell d = offset(h);
    return {c.row + d.row, c.col + d.col};
}

constexpr int manhattan(Cell a, Cell b) {
    return (a.row > b.row ? a.row - b.row : b.row - a.row) + (a.col > b.col ? a.col - b.col : b.col - a.col);
}

// Egocentric coordinates of `target` seen from `origin` facing `h`: forward distance and
// lateral offset (positive to the right).
struct Egocentric {
    int forward = 0;
    int lateral = 0;
    auto operator<=>(const Egocentric&) const = default;
};
Egocentric to_egocentric(Cell origin, Heading h, Cell target);

std::string_view to_string(Heading h);
std::string_view to_string(Pitch p);
std::string_view to_string(Elevation e);
std::optional<Heading> parse_heading(std::string_view s);
std::optional<Pitch> parse_pitch(std::string_view s);
std::optional<Elevation> parse_elevation(std::string_view s);

enum class Terrain : std::uint8_t { Floor, Wall };

// Static room layout. Cells are row-major.
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, std::vector<Terrain> cells);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return cells_.size(); }
    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_; }
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols_ + c.col; }
    Cell cell(std::size_t index) const { return {static_cast<int>(index / cols_), static_cast<int>(index % cols_)}; }
    Terrain at(Cell c) const { return cells_[index(c)]; }
    bool is_wall(Cell c) const { return !in_bounds(c) || at(c) == Terrain::Wall; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Terrain> cells_;
};

// Row-major boolean mask over a grid.
struct CellMask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits;

    CellMask() = default;
    CellMask(int r, int c, bool value = false)
        : rows(r), cols(c), bits(static_cast<std::size_t>(r) * c, value ? 1 : 0) {}
    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
    bool at(Cell c) const { return in_bounds(c) && bits[static_cast<std::size_t>(c.row) * cols + c.col] != 0; }
    void set(Cell c, bool v) { bits[static_cast<std::size_t>(c.row) * cols + c.col] = v ? 1 : 0; }
    std::size_t count() const;
    bool operator==(const CellMask&) const = default;
};

}  // namespace opex::sim
