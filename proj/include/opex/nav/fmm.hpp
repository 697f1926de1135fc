#pragma once

#include <limits>
#include <string>
#include <vector>

#include "opex/sim/geometry.hpp"

namespace opex::nav {

using sim::Cell;
using sim::CellMask;

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct DistanceField {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
    double at(Cell c) const { return in_bounds(c) ? values[static_cast<std::size_t>(c.row) * cols + c.col] : kUnreachable; }
    bool reachable(Cell c) const { return at(c) < kUnreachable; }
    std::string render(int precision = 1) const;
};

// Unit-speed eikonal solve on a 4-connected grid: first-order upwind update, min-heap front.
// Throws std::invalid_argument for an empty goal set or a goal outside the traversable set.
DistanceField fmm_distance_field(const CellMask& traversable, const std::vector<Cell>& goals);

// The upwind update a cell would receive from its current neighbour values.
double eikonal_update(const DistanceField& f, Cell c);

}  // namespace opex::nav
