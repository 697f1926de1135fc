#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opex/nav/policy.hpp"
#include "opex/perception/semantic_maps.hpp"
#include "opex/sim/simulator.hpp"

namespace opex::skills {

enum class Skill : std::uint8_t {
    NavigateToObject,
    Explore,
    LookAround,
    RequireReplan,
    PickupObject,
    PutObject,
    OpenObject,
    CloseObject,
    ToggleObjectOn,
    ToggleObjectOff,
    SliceObject,
};

struct CatalogEntry {
    Skill skill;
    std::string_view name;
    int arity;
    std::string_view description;
};

std::span<const CatalogEntry> skill_catalog();
const CatalogEntry& catalog_entry(Skill s);
std::optional<Skill> parse_skill(std::string_view name);
std::string_view to_string(Skill s);

struct SkillInvocation {
    Skill skill = Skill::LookAround;
    std::string target;  // object class, as a class name or its display words
};

// Throws std::invalid_argument when the target does not match the skill's arity.
void validate(const SkillInvocation& inv);

// Object class named by free text ("Desk Lamp", "desklamp", "DeskLamp", "desk lamp").
std::optional<sim::ClassId> resolve_class(std::string_view text);

enum class SkillStatus : std::uint8_t { Done, Failed, ReplanRequested };
std::string_view to_string(SkillStatus s);

struct SkillOutcome {
    SkillStatus status = SkillStatus::Done;
    int steps_taken = 0;
    std::optional<std::string> error_message;
    std::vector<std::string> feedback;
};

namespace errors {
inline constexpr std::string_view kNeverFound = "target never found";
inline constexpr std::string_view kBudget = "navigation budget exceeded";
inline constexpr std::string_view kStranded = "navigation stranded";
inline constexpr std::string_view kEpisodeCap = "maximum number of steps reached";
}  // namespace errors

struct StepEvent {
    sim::LowLevelAction action;
    sim::StepOutcome outcome;
    std::uint64_t digest_before = 0;
    std::optional<sim::ClassId> target_class;  // mapped label of the target before the step
    const sim::EgocentricObservation* observation = nullptr;  // after the step
};

// Everything a skill reads or mutates during one episode.
struct AgentContext {
    explicit AgentContext(sim::Simulator& s, nav::PolicyConfig cfg = {});

    sim::Simulator& sim;
    perception::SemanticMaps maps;
    nav::ExplorationState explore;
    nav::SliceMemory slice;
    nav::PolicyConfig policy;
    sim::EgocentricObservation last_obs;
    int nav_budget = 50;
    bool auto_navigate = true;
    std::function<void(const StepEvent&)> on_step;

    // Beliefs kept from successful actions.
    std::optional<sim::ObjectId> held;
    std::optional<sim::ClassId> held_class;
    std::vector<sim::ObjectId> placed;  // put into a non-appliance receptacle

    // Observe without acting (start of an episode).
    void refresh();
    // One simulator step with observation fusion and bookkeeping.
    sim::StepOutcome act(const sim::LowLevelAction& a);
    bool visible(sim::ObjectId handle) const;
    std::vector<std::string> visible_classes() const;
};

SkillOutcome execute_skill(const SkillInvocation& inv, AgentContext& ctx);

}  // namespace opex::skills
