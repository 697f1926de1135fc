#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "opex/harness/metrics.hpp"
#include "opex/harness/trajectory.hpp"
#include "opex/roles/backend.hpp"
#include "opex/sim/scenario.hpp"

namespace opex::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BackendChoice { Oracle, Scripted, Remote };
std::string to_string(BackendChoice b);
BackendChoice parse_backend(const std::string& s);

// Every switch on = the full agent.
struct Ablations {
    bool m_prime = true;
    bool planner = true;
    bool observer = true;
    bool slice_replay = true;
    bool traversable_goal = true;
};
// Names accepted on the command line: m-prime, planner, observer, slice-replay, traversable-goal.
void disable(Ablations& a, const std::string& name);
std::vector<std::string> ablation_names();

enum class EpisodeMode { Agent, Dialogue };

struct EpisodeConfig {
    std::filesystem::path scenario_path;
    std::optional<sim::Scenario> scenario;  // preloaded; wins over the path
    EpisodeMode mode = EpisodeMode::Agent;
    BackendChoice backend = BackendChoice::Oracle;
    // Scripted: {"planner": [...], "observer": [...], "executor": [...]} (or reasoner/actor for
    // dialogue), each a transcript list of {prompt_digest, completion}.
    std::filesystem::path transcript;
    roles::RemoteConfig remote;
    std::optional<double> noise;  // overrides the scenario's mislabel probability
    std::optional<std::uint64_t> seed;
    Ablations ablate;
    std::filesystem::path pool;  // in-context examples for the planner; empty = none
    int k = 3;
    std::optional<int> expert_length;  // skips the expert search when known
    std::filesystem::path knowledge;   // dialogue mode
    int turn_cap = 30;
};

nlohmann::json config_json(const EpisodeConfig& c);
EpisodeConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Confusable pairs used when noise is switched on for a scenario without its own table.
std::map<sim::ClassId, std::vector<sim::ClassId>> default_confusion();

// Goal-object localization score of one episode: per step, the share of returned candidates
// that really are goal-class instances, for the cascaded and the M-only lookup.
struct LocalizationTally {
    double cascaded_sum = 0.0;
    double m_only_sum = 0.0;
    int queries = 0;
    double cascaded() const { return queries ? cascaded_sum / queries : 0.0; }
    double m_only() const { return queries ? m_only_sum / queries : 0.0; }
    void add(const LocalizationTally& o) {
        cascaded_sum += o.cascaded_sum;
        m_only_sum += o.m_only_sum;
        queries += o.queries;
    }
};

struct EpisodeResult {
    Trajectory trajectory;
    LocalizationTally localization;
};

// Loads, validates and runs one episode. Config problems throw ConfigError before any step.
EpisodeResult run_episode_full(const EpisodeConfig& cfg);
Trajectory run_episode(const EpisodeConfig& cfg);

struct SuiteResult {
    std::vector<Trajectory> trajectories;  // manifest order
    RunMetrics metrics;
    std::map<ErrorMode, int> errors;
    LocalizationTally localization;
    int parse_failures = 0;
};

// Manifest: {"defaults": {config}, "episodes": [{"scenario": path, ...overrides}]}. Paths are
// relative to the manifest. Empty manifests and unloadable scenarios throw ConfigError.
std::vector<EpisodeConfig> load_manifest(const std::filesystem::path& path);
SuiteResult run_suite(const std::vector<EpisodeConfig>& episodes, int jobs = 1);

std::string results_csv(const SuiteResult& r);
nlohmann::json summary_json(const SuiteResult& r);

}  // namespace opex::harness
