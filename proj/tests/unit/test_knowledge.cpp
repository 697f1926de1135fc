#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "knowledge_fixture.hpp"
#include "opex/knowledge/knowledge.hpp"
#include "opex/roles/backend.hpp"
#include "support.hpp"

using namespace opex;
using namespace opex::knowledge;
using testsupport::cell;
using testsupport::json;

namespace {

// 7x7 room: a mug on the counter, another on the dining table, a closed cabinet, a sink.
json two_mugs() {
    json doc;
    doc["name"] = "two_mugs";
    doc["room_type"] = "kitchen";
    doc["grid"] = testsupport::open_room(7, 7);
    doc["receptacles"] = json::array({
        {{"id", "countertop_1"}, {"class", "CounterTop"}, {"cell", cell(1, 1)}},
        {{"id", "diningtable_1"}, {"class", "DiningTable"}, {"cell", cell(1, 5)}},
        {{"id", "cabinet_1"}, {"class", "Cabinet"}, {"cell", cell(5, 5)}},
        {{"id", "sinkbasin_1"}, {"class", "SinkBasin"}, {"cell", cell(5, 1)}},
    });
    doc["objects"] = json::array({{{"id", "mug_1"}, {"class", "Mug"}, {"in", "countertop_1"}},
                                  {{"id", "mug_2"}, {"class", "Mug"}, {"in", "diningtable_1"}}});
    doc["agent"] = {{"cell", cell(3, 3)}, {"heading", "N"}, {"pitch", "level"}};
    doc["task"] = {{"type", "PickTwo&Place"},
                   {"high_level", "put two mugs in the cabinet"},
                   {"targets", {{"object", "Mug"}, {"receptacle", "Cabinet"}}}};
    doc["seed"] = 3;
    return doc;
}

const std::vector<Triple> kAllTriples = [] {
    std::vector<Triple> out;
    for (bool pol : {true, false}) {
        out.push_back({"agent", "hold-multiple", pol});
        out.push_back({"sinkbasin", "cleans-in", pol});
        out.push_back({"microwave", "heats-in", pol});
        out.push_back({"countertop", "heats-in", pol});
        out.push_back({"fridge", "cools-in", pol});
        out.push_back({"cabinet", "opens-before-access", pol});
        out.push_back({"fridge", "opens-before-access", pol});
        out.push_back({"drawer", "opens-before-access", pol});
        out.push_back({"desklamp", "lights-with", pol});
        out.push_back({"floorlamp", "lights-with", pol});
    }
    return out;
}();

KnowledgeItem item(Triple t, int support, Source src = Source::Learned) {
    return {statement_for(t), std::move(t), support, src};
}

roles::ScriptedBackend scripted(std::vector<std::string> completions) {
    std::vector<roles::TranscriptEntry> e;
    for (auto& c : completions) e.push_back({std::nullopt, std::move(c)});
    return roles::ScriptedBackend(std::move(e));
}

ExplorerFactory rule_explorer() {
    return [](const sim::Scenario&, std::uint64_t seed) { return std::make_unique<RuleExplorer>(seed); };
}

}  // namespace

TEST_CASE("canonical statements normalize back to their triples") {
    for (const auto& t : kAllTriples) {
        CAPTURE(to_string(t));
        const auto back = normalize_statement(statement_for(t));
        REQUIRE(back);
        CHECK(*back == t);
    }
}

TEST_CASE("paraphrases normalize by keyword") {
    CHECK(normalize_statement("You can only carry one item at a time.") == Triple{"agent", "hold-multiple", false});
    CHECK(normalize_statement("The agent is able to hold two things at once") == Triple{"agent", "hold-multiple", true});
    CHECK(normalize_statement("The fridge needs to be opened first.") == Triple{"fridge", "opens-before-access", true});
    CHECK(normalize_statement("A mug gets washed in the sink basin") == Triple{"sinkbasin", "cleans-in", true});
    CHECK(normalize_statement("Use a desk lamp to look at things in light.") == Triple{"desklamp", "lights-with", true});
    CHECK_FALSE(normalize_statement("Mugs are usually blue."));
    CHECK_FALSE(normalize_statement("Objects get clean eventually."));  // no receptacle to anchor it
}

TEST_CASE("filtering the twenty candidate fixture") {
    const auto cands = testsupport::twenty_candidates();
    REQUIRE(cands.size() == 20);
    const auto expected = testsupport::twenty_expected();
    const auto r = filter_knowledge(cands);
    REQUIRE(r.items.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CAPTURE(i);
        CHECK(r.items[i] == expected[i]);
    }
    CHECK_FALSE(r.log.empty());
    CHECK(filter_knowledge(r.items).items == r.items);
}

TEST_CASE("filter output is consistent and idempotent on random candidate sets") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<KnowledgeItem> cands;
        const int n = static_cast<int>(rng() % 25);
        for (int i = 0; i < n; ++i)
            cands.push_back(item(kAllTriples[rng() % kAllTriples.size()], 1 + static_cast<int>(rng() % 4),
                                 rng() % 5 == 0 ? Source::Human : Source::Learned));
        const auto out = filter_knowledge(cands).items;
        std::set<std::pair<std::string, std::string>> keys;
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(keys.insert({out[i].triple.subject, out[i].triple.relation}).second);
            if (i > 0) {
                const bool ordered = out[i - 1].support > out[i].support ||
                                     (out[i - 1].support == out[i].support && out[i - 1].statement <= out[i].statement);
                CHECK(ordered);
            }
        }
        // Support is conserved for every triple that survives.
        for (const auto& k : out) {
            int total = 0;
            for (const auto& c : cands)
                if (c.triple == k.triple) total += c.support;
            CHECK(k.support == total);
        }
        CHECK(filter_knowledge(out).items == out);
    }
}

TEST_CASE("knowledge files round trip and reject bad sources") {
    const auto dir = std::filesystem::temp_directory_path() / "opex_knowledge_test";
    std::filesystem::create_directories(dir);
    const std::vector<KnowledgeItem> items = {item({"agent", "hold-multiple", false}, 3),
                                              item({"fridge", "cools-in", true}, 1, Source::Human)};
    save_knowledge(dir / "k.json", items);
    CHECK(load_knowledge(dir / "k.json") == items);

    CHECK_THROWS(knowledge_from_json(json::array({{{"statement", "x"}, {"source", "oracle"}}})));
    CHECK_THROWS(knowledge_from_json(json::array({{{"statement", "Mugs are blue."}}})));
    // Triple may be omitted when the statement normalizes.
    const auto k = knowledge_from_json(json::array({{{"statement", "You can only hold one object at a time."}, {"source", "human"}}}));
    CHECK(k.at(0).triple == Triple{"agent", "hold-multiple", false});
}

TEST_CASE("text env mirrors the household rules") {
    TextEnv env(sim::load_scenario(two_mugs()));
    CHECK(env.reset().find("you see a cabinet 1, a countertop 1, a diningtable 1, and a sinkbasin 1.") != std::string::npos);
    CHECK(env.step("go to cabinet 1") == "You arrive at cabinet 1. The cabinet 1 is closed.");
    CHECK(env.step("go to countertop 1") == "You arrive at countertop 1. On the countertop 1, you see a mug 1.");
    CHECK(env.step("take mug 1 from countertop 1") == "You pick up the mug 1 from the countertop 1.");
    env.step("go to diningtable 1");
    CHECK(env.step("take mug 2 from diningtable 1") == kNothingHappens);
    env.step("go to cabinet 1");
    CHECK(env.step("put mug 1 in cabinet 1") == kNothingHappens);
    CHECK(env.step("open cabinet 1") == "You open the cabinet 1. The cabinet 1 is open. In it, you see nothing.");
    CHECK(env.step("put mug 1 in cabinet 1") == "You put the mug 1 in the cabinet 1.");
    CHECK(env.step("dance wildly") == kNothingHappens);
    CHECK_FALSE(env.success());
}

TEST_CASE("exploration budget must be positive") {
    const auto sc = sim::load_scenario(two_mugs());
    CHECK_THROWS_AS(explore_collect({sc}, rule_explorer(), 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(explore_collect({}, rule_explorer(), 1, 1), std::invalid_argument);
}

TEST_CASE("exploration logs alternate observations and actions") {
    const auto sc = sim::load_scenario(two_mugs());
    const auto log = explore_collect({sc}, rule_explorer(), 3, 7, 25);
    REQUIRE(log.sequences.size() == 3);
    for (const auto& s : log.sequences) {
        CHECK(s.observations.size() == s.actions.size() + 1);
        CHECK(s.actions.size() <= 25);
    }
    CHECK(log_from_json(log_json(log)).sequences.size() == 3);
    // Same seed, same log.
    CHECK(log_json(explore_collect({sc}, rule_explorer(), 3, 7, 25)) == log_json(log));
}

TEST_CASE("rule summarizer learns hold-one and closed receptacles from repeated episodes") {
    const auto sc = sim::load_scenario(two_mugs());
    const auto log = explore_collect({sc}, rule_explorer(), 4, 5);
    const auto sum = summarize_rules(log);
    auto find = [&](const Triple& t) -> const KnowledgeItem* {
        for (const auto& k : sum.candidates)
            if (k.triple == t) return &k;
        return nullptr;
    };
    const auto* hold = find({"agent", "hold-multiple", false});
    REQUIRE(hold);
    CHECK(hold->support >= kRepetitionThreshold);
    CHECK(hold->support <= 4);
    for (const auto& k : sum.candidates) CHECK(k.support >= kRepetitionThreshold);

    // A single episode never clears the threshold.
    CHECK(summarize_rules(explore_collect({sc}, rule_explorer(), 1, 5)).candidates.empty());
}

TEST_CASE("free-text summaries are normalized or dropped with a reason") {
    AOSequence s{"e#0", {"You are in the middle of a room."}, {}};
    auto backend = scripted({"1. The agent can only hold one object at a time.\n2. Mugs are blue.\n- The fridge must be opened first."});
    const auto r = summarize_with({{s}}, backend);
    REQUIRE(r.candidates.size() == 2);
    CHECK(r.candidates[0].triple == Triple{"agent", "hold-multiple", false});
    CHECK(r.candidates[1].triple == Triple{"fridge", "opens-before-access", true});
    REQUIRE(r.dropped.size() == 1);
    CHECK(r.dropped[0].find("Mugs are blue.") != std::string::npos);
}

TEST_CASE("hold-one knowledge turns a failing double pickup into a success") {
    const auto sc = sim::load_scenario(two_mugs());
    const std::vector<KnowledgeItem> facts = {item({"agent", "hold-multiple", false}, 2)};

    RuleReasoner naive_r(sc);
    RuleActor naive_a;
    const auto naive = run_dialogue(sc, {}, naive_r, naive_a, 30);
    CHECK(naive.trajectory.termination == harness::causes::kActorFinished);
    CHECK_FALSE(naive.trajectory.goal.success);
    bool failed_take = false;
    for (const auto& r : naive.trajectory.records)
        if (r.type == "step" && r.name.rfind("take mug 2", 0) == 0 && !r.success) failed_take = true;
    CHECK(failed_take);

    RuleReasoner r(sc);
    RuleActor a;
    const auto informed = run_dialogue(sc, facts, r, a, 30);
    CHECK(informed.trajectory.termination == harness::causes::kSuccess);
    CHECK(informed.trajectory.goal.success);
}

TEST_CASE("dialogue turns alternate and respect the turn cap") {
    const auto sc = sim::load_scenario(two_mugs());
    RuleReasoner r(sc);
    RuleActor a;
    const auto d = run_dialogue(sc, {}, r, a, 1);
    CHECK(d.trajectory.termination == harness::causes::kTurnCap);
    REQUIRE(d.turns.size() == 2);
    CHECK(d.turns[0].speaker == DialogueTurn::Speaker::Reasoner);
    CHECK(d.turns[1].speaker == DialogueTurn::Speaker::Actor);
    CHECK(d.turns[1].grounded_action == std::optional<std::string>("go to countertop 1"));
    CHECK(d.trajectory.agent_length == 1);
    CHECK_THROWS_AS(run_dialogue(sc, {}, r, a, 0), std::invalid_argument);
}

TEST_CASE("knowledge is injected into both dialogue prompts") {
    const auto sc = sim::load_scenario(two_mugs());
    const std::vector<KnowledgeItem> facts = {item({"agent", "hold-multiple", false}, 2),
                                              item({"cabinet", "opens-before-access", true}, 2)};
    RuleReasoner r(sc);
    RuleActor a;
    const auto d = run_dialogue(sc, facts, r, a, 3);
    REQUIRE(d.prompts.size() == 6);
    for (const auto& p : d.prompts)
        for (const auto& k : facts) CHECK(p.find(k.statement) != std::string::npos);

    RuleReasoner r2(sc);
    const auto bare = run_dialogue(sc, {}, r2, a, 1);
    for (const auto& p : bare.prompts) CHECK(p.find("Known facts about this world:\nNone") != std::string::npos);
}
