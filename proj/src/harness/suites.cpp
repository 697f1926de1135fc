#include "opex/harness/suites.hpp"

#include <fstream>
#include <ostream>

#include "opex/common/text.hpp"
#include "opex/harness/generator.hpp"
#include "opex/knowledge/knowledge.hpp"
#include "opex/roles/oracle.hpp"
#include "opex/sim/expert.hpp"
#include "opex/sim/scenario.hpp"

namespace opex::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string sentence(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (!s.empty() && s.back() != '.') s += '.';
    return s;
}

void write_json(const fs::path& p, const json& doc) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << doc.dump(2) << '\n';
}

std::string type_slug(sim::TaskType t) {
    std::string s = text::to_lower(std::string(sim::to_string(t)));
    for (auto& c : s)
        if (c == '&') c = '_';
    return s;
}

const char* kWashedBowlInstruction = "Put a clean bowl in a cabinet.";
const char* kWashedBowlPlan =
    "Task type: PICK_CLEAN_THEN_PLACE_IN_RECEP\n"
    "Thought: To complete the task, I need to find a bowl, pick it up, wash it in the sink basin, "
    "then find a cabinet and put the clean bowl inside.\n"
    "Plan:\n"
    "1. Find the bowl\n"
    "2. Pick up the bowl\n"
    "3. Go to the sink basin\n"
    "4. Clean the bowl\n"
    "5. Go to the cabinet\n"
    "6. Put the bowl in the cabinet";

}  // namespace

std::string planner_example(const std::string& instruction, const roles::SubtaskPlan& plan) {
    return "Task: " + instruction + "\n" + roles::render_plan(plan);
}

selector::ExamplePool build_example_pool(selector::EmbeddingBackend& backend, int per_type, std::uint64_t seed) {
    selector::ExamplePool pool;
    for (auto type : sim::all_task_types()) {
        for (int i = 0; i < per_type; ++i) {
            selector::PoolEntry e;
            if (type == sim::TaskType::CleanPlace && i == 0) {
                e.instruction = kWashedBowlInstruction;
                e.example = std::string("Task: ") + kWashedBowlInstruction + "\n" + kWashedBowlPlan;
            } else {
                GeneratorOptions opt;
                opt.type = type;
                opt.seed = seed + static_cast<std::uint64_t>(i);
                opt.sliced = i == per_type - 1 && type != sim::TaskType::StackPlace && type != sim::TaskType::PickTwoPlace &&
                             type != sim::TaskType::ExamineInLight;
                const auto doc = generate_scenario(opt, "train");
                const auto sc = sim::load_scenario(doc);
                e.instruction = sentence(sc.task.high_level);
                e.example = planner_example(e.instruction, roles::oracle_plan(type, sc.goals.targets));
            }
            e.embedding = selector::embed(e.instruction, backend);
            pool.entries.push_back(std::move(e));
        }
    }
    return pool;
}

void write_standard_suites(const fs::path& data_dir, std::ostream* progress) {
    const fs::path suites = data_dir / "suites";
    auto log = [&](const std::string& s) {
        if (progress) *progress << s << std::endl;
    };
    auto emit = [&](const fs::path& dir, const std::string& name, const json& doc, bool expert) {
        write_json(dir / (name + ".json"), doc);
        json entry = {{"scenario", dir.filename().string() + "/" + name + ".json"}};
        if (expert) {
            entry["expert_length"] = sim::expert_path_length(sim::load_scenario(doc));
            log(name + ": expert " + std::to_string(entry["expert_length"].get<int>()));
        }
        return entry;
    };

    // Zero-noise oracle suite: five per type, goals in view at the start.
    json oracle = json::array();
    json smoke = json::array();
    for (auto type : sim::all_task_types()) {
        for (int i = 1; i <= 5; ++i) {
            GeneratorOptions opt;
            opt.type = type;
            opt.seed = static_cast<std::uint64_t>(i);
            opt.sliced = i == 5 && (type == sim::TaskType::PickPlace || type == sim::TaskType::CoolPlace);
            const std::string name = type_slug(type) + "_" + std::to_string(i);
            auto entry = emit(suites / "oracle", name, generate_scenario(opt, name), true);
            if (i == 1) smoke.push_back(entry);
            oracle.push_back(std::move(entry));
        }
    }
    write_json(suites / "oracle.json", {{"defaults", {{"backend", "oracle"}, {"pool", "../pool/examples.json"}}}, {"episodes", oracle}});
    write_json(suites / "smoke.json", {{"defaults", {{"backend", "oracle"}, {"pool", "../pool/examples.json"}}}, {"episodes", smoke}});

    // Noisy suite: fifty cluttered rooms with confusable distractors, mislabel p = 0.2.
    json noisy = json::array();
    const auto types = sim::all_task_types();
    for (int i = 0; i < 50; ++i) {
        GeneratorOptions opt;
        opt.type = types[static_cast<std::size_t>(i) % types.size()];
        opt.seed = 100 + static_cast<std::uint64_t>(i);
        opt.style = LayoutStyle::Cluttered;
        opt.mislabel = 0.2;
        opt.distractors = 2;
        const std::string name = "noisy_" + std::to_string(i) + "_" + type_slug(opt.type);
        noisy.push_back(emit(suites / "noisy", name, generate_scenario(opt, name), true));
    }
    write_json(suites / "noisy.json", {{"defaults", {{"backend", "oracle"}, {"pool", "../pool/examples.json"}}}, {"episodes", noisy}});

    // Two-object fixtures for the dialogue runs.
    json two = json::array();
    std::vector<sim::Scenario> two_scenarios;
    for (int i = 0; i < 6; ++i) {
        GeneratorOptions opt;
        opt.type = sim::TaskType::PickTwoPlace;
        opt.seed = 200 + static_cast<std::uint64_t>(i);
        const std::string name = "two_object_" + std::to_string(i);
        const auto doc = generate_scenario(opt, name);
        two_scenarios.push_back(sim::load_scenario(doc));
        two.push_back(emit(suites / "two_object", name, doc, false));
    }
    write_json(suites / "two_object_without.json", {{"defaults", {{"mode", "dialogue"}, {"backend", "oracle"}}}, {"episodes", two}});
    write_json(suites / "two_object_learned.json",
               {{"defaults", {{"mode", "dialogue"}, {"backend", "oracle"}, {"knowledge", "../knowledge/learned.json"}}},
                {"episodes", two}});
    write_json(suites / "two_object_human.json",
               {{"defaults", {{"mode", "dialogue"}, {"backend", "oracle"}, {"knowledge", "../knowledge/human.json"}}},
                {"episodes", two}});

    // Learned knowledge: explore the two-object rooms, summarize, filter.
    const auto explorer = [](const sim::Scenario&, std::uint64_t s) { return std::make_unique<knowledge::RuleExplorer>(s); };
    const auto exploration = knowledge::explore_collect(two_scenarios, explorer, 12, 7);
    write_json(data_dir / "knowledge" / "exploration.json", knowledge::log_json(exploration));
    const auto learned = knowledge::filter_knowledge(knowledge::summarize_rules(exploration).candidates).items;
    knowledge::save_knowledge(data_dir / "knowledge" / "learned.json", learned);
    log("learned knowledge: " + std::to_string(learned.size()) + " items");

    selector::HashEmbedding hash;
    fs::create_directories(data_dir / "pool");
    build_example_pool(hash).save(data_dir / "pool" / "examples.json");
}

}  // namespace opex::harness
