#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "opex/harness/trajectory.hpp"

namespace opex::harness {

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EpisodeScore {
    std::string episode;
    bool success = false;
    double gc = 0.0;
    int expert_length = 0;
    int agent_length = 0;
    double weight = 1.0;
};

// All rates in [0, 1].
struct RunMetrics {
    double sr = 0.0;
    double gc = 0.0;
    double plwsr = 0.0;
    double plwgc = 0.0;
    std::vector<EpisodeScore> episodes;
};

// L* / max(L*, L̂); 1 when the agent was at least as short as the expert.
double path_weight(int expert_length, int agent_length);

// Throws MetricError naming the first episode without an expert length.
RunMetrics compute_metrics(const std::vector<Trajectory>& trajectories);

enum class ErrorMode { GoalObjectNotFound, InteractionFailures, Collisions, ObjectInClosedReceptacle, Others };
std::string to_string(ErrorMode m);
std::vector<ErrorMode> all_error_modes();

inline constexpr int kCollisionPercent = 30;
inline constexpr int kInteractionFailureCount = 3;

// First matching rule wins: goal class never mapped, closed goal container never opened,
// collisions >= 30% of failed steps, >= 3 failed interactions on goal objects, else Others.
// Throws std::invalid_argument on a successful trajectory.
ErrorMode classify_error(const Trajectory& t);

std::map<ErrorMode, int> error_histogram(const std::vector<Trajectory>& trajectories);

}  // namespace opex::harness
