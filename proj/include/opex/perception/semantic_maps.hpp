#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opex/sim/observation.hpp"

namespace opex::perception {

using sim::Cell;
using sim::CellMask;
using sim::ClassId;
using sim::ObjectId;

enum class MapSource : std::uint8_t { MPrime, M };
std::string_view to_string(MapSource s);

struct Candidate {
    Cell cell{};
    ObjectId handle = sim::kStructuralHandle;
    sim::Elevation elevation = sim::Elevation::Mid;
};

struct LocateResult {
    MapSource source = MapSource::MPrime;
    std::vector<Candidate> candidates;  // row-major, then by handle
};

// Instantaneous map M (last write wins per visible cell) plus the vote counters behind the
// majority view M'. Votes are kept per (cell, instance handle) track so several objects
// sharing a receptacle cell each get their own majority label; bare cells have one
// structural track.
class SemanticMaps {
public:
    SemanticMaps() = default;
    SemanticMaps(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void update(const sim::EgocentricObservation& obs);
    // Object left its cell (picked up): hide its tracks from both views without touching the
    // counters.
    void note_removed(ObjectId handle);
    void note_collision(Cell c);

    const CellMask& explored() const { return explored_; }
    const CellMask& collisions() const { return collisions_; }

    // Raw counter for (cell, class), summed over the cell's tracks.
    std::uint32_t votes(Cell c, ClassId cls) const;
    // Labels of the M view at a cell.
    std::vector<ClassId> instant_labels(Cell c) const;
    // Strict-argmax labels of the M' view at a cell; tied tracks contribute nothing.
    std::vector<ClassId> majority_labels(Cell c) const;

    // M' first; M only when the class has no cell in M'. With use_mprime false only M is used.
    std::optional<LocateResult> locate(ClassId cls, bool use_mprime = true) const;
    // Where the instance was last mapped (M' tracks first, then M).
    std::optional<Candidate> find_instance(ObjectId handle, bool use_mprime = true) const;
    // Label the given instance carries in the effective view, if any.
    std::optional<ClassId> label_of(ObjectId handle, bool use_mprime = true) const;

    // Per-cell cascaded view: M' labels where M' has any, else M labels.
    std::vector<ClassId> effective_labels(Cell c, bool use_mprime = true) const;
    CellMask traversable(bool optimistic_unknown, bool use_mprime = true) const;

    std::string dump() const;

private:
    struct Track {
        ObjectId handle = sim::kStructuralHandle;
        std::vector<std::pair<ClassId, std::uint32_t>> counts;
        std::vector<std::pair<ClassId, std::uint32_t>> baseline;
        std::optional<ClassId> majority() const;
        sim::Elevation elevation = sim::Elevation::Mid;
    };
    struct CellData {
        std::vector<Track> tracks;
        std::vector<Candidate> instant;  // candidate.handle + label below
        std::vector<ClassId> instant_labels;
    };

    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols_ + c.col; }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<CellData> cells_;
    CellMask explored_;
    CellMask collisions_;
};

}  // namespace opex::perception
