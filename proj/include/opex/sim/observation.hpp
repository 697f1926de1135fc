#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opex/sim/world.hpp"

namespace opex::sim {

struct NoiseConfig {
    double mislabel = 0.0;  // p: probability a detection takes a confusable label
    double drop = 0.0;      // q: probability an object detection is missing
    // class -> classes it can be mistaken for; classes without an entry are never mislabeled
    std::map<ClassId, std::vector<ClassId>> confusion;
};

// Handle carried by Wall/Floor detections of bare cells.
inline constexpr ObjectId kStructuralHandle = 0;

struct Detection {
    ClassId label = 0;
    Cell cell{};
    ObjectId handle = kStructuralHandle;
    Elevation elevation = Elevation::Mid;
    bool open = true;
    ObjectFlags flags;
};

struct EgocentricObservation {
    AgentPose pose;
    std::vector<Detection> detections;
    std::vector<Cell> visible_cells;  // row-major order
    std::uint64_t digest = 0;
    std::optional<ObjectId> held;
    ClassId held_class = 0;
};

// Purposes of the counter-based draws, so a test can replay the stream.
enum class NoiseDraw : std::uint64_t { Mislabel = 0, Drop = 1, Choice = 2 };

// Uniform [0,1) draw for one detection. Structural detections are keyed by their cell.
double noise_draw(std::uint64_t rng_seed, std::uint64_t key, NoiseDraw purpose);
std::uint64_t structural_key(Cell c);

// Hash of the true visible scene expressed in egocentric terms, independent of noise.
std::uint64_t scene_digest(const WorldState& s);

EgocentricObservation observe(const WorldState& s, const NoiseConfig& noise, std::uint64_t rng_seed);

}  // namespace opex::sim
