#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "opex/roles/grammar.hpp"
#include "opex/selector/selector.hpp"
#include "opex/sim/goals.hpp"

namespace opex::harness {

// "Task: <instruction>\n" followed by the rendered plan.
std::string planner_example(const std::string& instruction, const roles::SubtaskPlan& plan);

// Ten (per_type) generated training instructions per task type with their template plans. The
// washed-bowl transcription stands in for the first cleaning example.
selector::ExamplePool build_example_pool(selector::EmbeddingBackend& backend, int per_type = 10, std::uint64_t seed = 1000);

// Writes the shipped suites under data_dir/suites (oracle, noisy, two_object, smoke) with their
// manifests, the learned and human knowledge files under data_dir/knowledge, and the example
// pool under data_dir/pool. Expert lengths are searched once and stored in the manifests.
void write_standard_suites(const std::filesystem::path& data_dir, std::ostream* progress = nullptr);

}  // namespace opex::harness
