#include <doctest.h>

#include <random>

#include "opex/sim/expert.hpp"
#include "opex/sim/simulator.hpp"
#include "support.hpp"

using namespace opex::sim;
using testsupport::act;
using testsupport::cell;
using testsupport::json;

namespace {

std::string load_error(const json& doc) {
    try {
        load_scenario(doc);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

json sink_scene() {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"].push_back({{"id", "sink_1"}, {"class", "SinkBasin"}, {"cell", cell(3, 1)}});
    doc["objects"] = json::array({
        {{"id", "mug_1"}, {"class", "Mug"}, {"in", "sink_1"}},
        {{"id", "faucet_1"}, {"class", "Faucet"}, {"in", "sink_1"}},
    });
    doc["agent"] = {{"cell", cell(3, 2)}, {"heading", "W"}};
    doc["task"]["type"] = "Clean&Place";
    return doc;
}

}  // namespace

TEST_CASE("minimal pick and place loads with two goal conditions") {
    const Scenario sc = load_scenario(testsupport::minimal_pick_place());
    CHECK(testsupport::minimal_pick_place()["objects"].size() == 1);
    CHECK(sc.goals.conditions.size() == 2);
    CHECK(check_goal(sc.initial, sc.goals).total == 2);
    CHECK(check_goal(sc.initial, sc.goals).satisfied == 0);
    CHECK(sc.initial.agent.cell == Cell{3, 2});
    CHECK(sc.limits.max_steps == 400);
    CHECK(sc.limits.max_failures == 30);
}

TEST_CASE("loading is deterministic") {
    const Scenario a = load_scenario(testsupport::minimal_pick_place());
    const Scenario b = load_scenario(testsupport::minimal_pick_place());
    CHECK(a.initial.same_world(b.initial));
    for (std::size_t i = 0; i < a.initial.object_count(); ++i)
        CHECK(a.initial.info(static_cast<ObjectIndex>(i)).handle == b.initial.info(static_cast<ObjectIndex>(i)).handle);
}

TEST_CASE("load errors name the offending field") {
    json doc = testsupport::minimal_pick_place();
    doc["agent"]["cell"] = cell(0, 0);
    CHECK(load_error(doc).find("agent not on traversable cell") != std::string::npos);

    doc = testsupport::minimal_pick_place();
    doc["goals"] = json::array();
    CHECK(load_error(doc).find("total ≥ 1 violated") != std::string::npos);

    doc = testsupport::minimal_pick_place();
    doc["objects"][0]["class"] = "Teapot";
    CHECK(load_error(doc).find("unknown object class") != std::string::npos);

    doc = testsupport::minimal_pick_place();
    doc.erase("agent");
    CHECK(load_error(doc).find("'agent'") != std::string::npos);

    doc = testsupport::minimal_pick_place();
    doc["objects"][0]["in"] = "cabinet_1";
    CHECK(load_error(doc).find("satisfied in the initial state") != std::string::npos);
}

TEST_CASE("move ahead and collisions") {
    Scenario sc = load_scenario(testsupport::minimal_pick_place());
    WorldState s = sc.initial;
    auto out = apply_step(s, act(ActionKind::MoveAhead));
    CHECK(out.success);
    CHECK(s.agent.cell == Cell{2, 2});
    CHECK(s.step_count == 1);
    apply_step(s, act(ActionKind::MoveAhead));
    const WorldState before = s;
    out = apply_step(s, act(ActionKind::MoveAhead));  // wall
    CHECK_FALSE(out.success);
    CHECK(out.error == "cannot move ahead: path blocked");
    CHECK(s.same_world(before));
    CHECK(s.step_count == before.step_count + 1);
}

TEST_CASE("pickup while holding fails and leaves the world unchanged") {
    json doc = testsupport::minimal_pick_place();
    doc["objects"].push_back({{"id", "cup_1"}, {"class", "Cup"}, {"in", "countertop_1"}});
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    apply_step(s, act(ActionKind::MoveAhead));
    apply_step(s, act(ActionKind::MoveAhead));
    apply_step(s, act(ActionKind::RotateLeft));
    REQUIRE(apply_step(s, act(ActionKind::PickupObject, s, "mug_1")).success);
    CHECK(s.held.has_value());
    CHECK_FALSE(s.cell_of(*s.held).has_value());
    const WorldState before = s;
    const auto out = apply_step(s, act(ActionKind::PickupObject, s, "cup_1"));
    CHECK_FALSE(out.success);
    CHECK(out.error == "cannot hold more than one object");
    CHECK(s.same_world(before));
}

TEST_CASE("toggling the faucet cleans what is in the sink") {
    Scenario sc = load_scenario(sink_scene());
    WorldState s = sc.initial;
    const auto mug = *s.find_by_name("mug_1");
    CHECK_FALSE(s.objects[mug].flags.clean);
    REQUIRE(apply_step(s, act(ActionKind::ToggleObjectOn, s, "faucet_1")).success);
    CHECK(s.objects[mug].flags.clean);
    CHECK(check_goal(s, sc.goals).satisfied == 1);
}

TEST_CASE("putting into a sink with running water cleans the object") {
    json doc = sink_scene();
    doc["objects"][0]["in"] = "countertop_1";
    doc["agent"] = {{"cell", cell(2, 1)}, {"heading", "N"}};
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    REQUIRE(apply_step(s, act(ActionKind::PickupObject, s, "mug_1")).success);
    apply_step(s, act(ActionKind::RotateRight));
    apply_step(s, act(ActionKind::RotateRight));
    REQUIRE(apply_step(s, act(ActionKind::ToggleObjectOn, s, "faucet_1")).success);
    REQUIRE(apply_step(s, act(ActionKind::PutObject, s, "sink_1")).success);
    CHECK(s.objects[*s.find_by_name("mug_1")].flags.clean);
}

TEST_CASE("microwave heats only when closed and opening turns it off") {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"][1] = {{"id", "microwave_1"}, {"class", "Microwave"}, {"cell", cell(1, 3)}, {"open", true}};
    doc["objects"][0]["in"] = "microwave_1";
    doc["agent"] = {{"cell", cell(2, 3)}, {"heading", "N"}};
    doc["task"]["type"] = "Heat&Place";
    doc["task"]["targets"]["receptacle"] = "CounterTop";
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    auto out = apply_step(s, act(ActionKind::ToggleObjectOn, s, "microwave_1"));
    CHECK(out.error == "cannot toggle on while open");
    REQUIRE(apply_step(s, act(ActionKind::CloseObject, s, "microwave_1")).success);
    REQUIRE(apply_step(s, act(ActionKind::ToggleObjectOn, s, "microwave_1")).success);
    CHECK(s.objects[*s.find_by_name("mug_1")].flags.hot);
    REQUIRE(apply_step(s, act(ActionKind::OpenObject, s, "microwave_1")).success);
    CHECK_FALSE(s.objects[*s.find_by_name("microwave_1")].flags.toggled_on);
    CHECK(s.objects[*s.find_by_name("mug_1")].flags.hot);
}

TEST_CASE("closing the fridge cools its contents") {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"][1] = {{"id", "fridge_1"}, {"class", "Fridge"}, {"cell", cell(1, 3)}, {"open", true}};
    doc["objects"][0]["in"] = "fridge_1";
    doc["agent"] = {{"cell", cell(2, 3)}, {"heading", "N"}};
    doc["task"]["type"] = "Cool&Place";
    doc["task"]["targets"]["receptacle"] = "CounterTop";
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    CHECK(apply_step(s, act(ActionKind::CloseObject, s, "fridge_1")).success);
    CHECK(s.objects[*s.find_by_name("mug_1")].flags.cold);
    CHECK(apply_step(s, act(ActionKind::CloseObject, s, "fridge_1")).error == "already closed");
}

TEST_CASE("closed receptacles hide and refuse contents") {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"][1]["open"] = false;
    doc["agent"] = {{"cell", cell(2, 3)}, {"heading", "N"}};
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    s.held = *s.find_by_name("mug_1");
    s.objects[*s.held].location = Location::held();
    CHECK(apply_step(s, act(ActionKind::PutObject, s, "cabinet_1")).error == "receptacle is closed");
    REQUIRE(apply_step(s, act(ActionKind::OpenObject, s, "cabinet_1")).success);
    CHECK(apply_step(s, act(ActionKind::PutObject, s, "cabinet_1")).success);
    REQUIRE(apply_step(s, act(ActionKind::CloseObject, s, "cabinet_1")).success);
    const auto obs = observe(s, {}, 3);
    for (const auto& d : obs.detections) CHECK(d.handle != s.info(*s.find_by_name("mug_1")).handle);
    CHECK(apply_step(s, act(ActionKind::PickupObject, s, "mug_1")).error == "target not visible");
}

TEST_CASE("slicing needs a knife and is permanent") {
    json doc = testsupport::minimal_pick_place();
    doc["objects"] = json::array({
        {{"id", "apple_1"}, {"class", "Apple"}, {"in", "countertop_1"}},
        {{"id", "knife_1"}, {"class", "Knife"}, {"in", "countertop_1"}},
    });
    doc["agent"] = {{"cell", cell(2, 1)}, {"heading", "N"}};
    doc["task"]["targets"]["object"] = "Apple";
    doc["task"]["sliced"] = true;
    Scenario sc = load_scenario(doc);
    CHECK(sc.goals.conditions.size() == 3);
    WorldState s = sc.initial;
    CHECK(apply_step(s, act(ActionKind::SliceObject, s, "apple_1")).error == "slicing requires a knife");
    REQUIRE(apply_step(s, act(ActionKind::PickupObject, s, "knife_1")).success);
    REQUIRE(apply_step(s, act(ActionKind::SliceObject, s, "apple_1")).success);
    CHECK(apply_step(s, act(ActionKind::SliceObject, s, "apple_1")).error == "already sliced");
    CHECK(s.objects[*s.find_by_name("apple_1")].flags.sliced);
}

TEST_CASE("high shelves need the camera raised") {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"][0]["elevation"] = "high";
    doc["agent"] = {{"cell", cell(2, 1)}, {"heading", "N"}};
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    CHECK(apply_step(s, act(ActionKind::PickupObject, s, "mug_1")).error == "target not visible");
    REQUIRE(apply_step(s, act(ActionKind::LookUp)).success);
    CHECK(apply_step(s, act(ActionKind::LookUp)).error == "cannot look up further");
    CHECK(apply_step(s, act(ActionKind::PickupObject, s, "mug_1")).success);
}

TEST_CASE("interaction beyond reach reports out of range") {
    Scenario sc = load_scenario(testsupport::minimal_pick_place());
    WorldState s = sc.initial;
    CHECK(apply_step(s, act(ActionKind::PickupObject, s, "mug_1")).error == "target out of range");
    CHECK(apply_step(s, act(ActionKind::OpenObject, s, "countertop_1")).error == "target out of range");
    CHECK(apply_step(s, {ActionKind::OpenObject, std::nullopt}).error == "action requires a target");
}

TEST_CASE("view cone covers a 45 degree wedge and walls occlude") {
    Grid g(7, 7, std::vector<Terrain>(49, Terrain::Floor));
    const CellMask v = visible_cells(g, {{6, 3}, Heading::North, Pitch::Level}, 5);
    CHECK(v.at({6, 3}));
    CHECK(v.at({5, 3}));
    CHECK(v.at({4, 1}));
    CHECK_FALSE(v.at({5, 1}));
    CHECK(v.at({1, 3}));
    CHECK_FALSE(v.at({0, 3}));  // Manhattan 6
    CHECK_FALSE(v.at({6, 4}));
    // Reference count: cells with 0 <= lateral <= forward and forward + |lateral| <= 5.
    std::size_t expected = 0;
    for (int f = 0; f <= 5; ++f)
        for (int l = -f; l <= f; ++l)
            if (f + std::abs(l) <= 5 && g.in_bounds({6 - f, 3 + l})) ++expected;
    CHECK(v.count() == expected);

    std::vector<Terrain> cells(49, Terrain::Floor);
    cells[g.index({4, 3})] = Terrain::Wall;
    Grid walled(7, 7, cells);
    const CellMask w = visible_cells(walled, {{6, 3}, Heading::North, Pitch::Level}, 5);
    CHECK(w.at({4, 3}));
    CHECK_FALSE(w.at({3, 3}));
    CHECK_FALSE(w.at({2, 3}));
}

TEST_CASE("noiseless observation equals the visible ground truth") {
    Scenario sc = load_scenario(testsupport::minimal_pick_place());
    const auto obs = observe(sc.initial, {}, 99);
    const CellMask view = visible_cells(sc.initial.grid(), sc.initial.agent, 5);
    std::size_t objects = 0;
    for (const auto& d : obs.detections) {
        CHECK(view.at(d.cell));
        if (d.handle == kStructuralHandle) continue;
        ++objects;
        const auto idx = sc.initial.find(d.handle);
        REQUIRE(idx.has_value());
        CHECK(d.label == sc.initial.info(*idx).cls);
        CHECK(d.cell == *sc.initial.cell_of(*idx));
    }
    std::size_t truth = 0;
    for (std::size_t i = 0; i < sc.initial.object_count(); ++i)
        truth += object_visible(sc.initial, static_cast<ObjectIndex>(i), view) ? 1 : 0;
    CHECK(objects == truth);
    CHECK(truth == 3);
}

TEST_CASE("certain mislabel maps a fridge to wall") {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"][1] = {{"id", "fridge_1"}, {"class", "Fridge"}, {"cell", cell(1, 3)}};
    doc["noise"] = {{"mislabel", 1.0}, {"confusion", {{"Fridge", {"Wall"}}}}};
    Scenario sc = load_scenario(doc);
    Simulator sim(sc);
    const auto obs = sim.observe();
    const ObjectId fridge = sc.initial.info(*sc.initial.find_by_name("fridge_1")).handle;
    bool seen = false;
    for (const auto& d : obs.detections)
        if (d.handle == fridge) {
            seen = true;
            CHECK(d.label == wall_class());
        }
    CHECK(seen);
}

TEST_CASE("seeded mislabel counts match an independent replay") {
    json doc = testsupport::minimal_pick_place();
    doc["noise"] = {{"mislabel", 0.2}, {"confusion", {{"Mug", {"Cup"}}}}};
    doc["seed"] = 7;
    Scenario sc = load_scenario(doc);
    Simulator sim(sc);
    const ObjectId mug = sc.initial.info(*sc.initial.find_by_name("mug_1")).handle;
    int observed = 0;
    for (int k = 0; k < 100; ++k)
        for (const auto& d : sim.observe().detections)
            if (d.handle == mug && d.label != sc.initial.info(*sc.initial.find_by_name("mug_1")).cls) ++observed;

    using testsupport::splitmix;
    auto mix2 = [](std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); };
    int replayed = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const std::uint64_t obs_seed = mix2(7, k);
        const std::uint64_t bits = mix2(mix2(obs_seed, mug), 0);
        const double u = static_cast<double>(bits >> 11) / 9007199254740992.0;
        if (u < 0.2) ++replayed;
    }
    CHECK(observed == replayed);
    CHECK(replayed > 5);
    CHECK(replayed < 40);
}

TEST_CASE("clean and place goal accounting") {
    json doc = testsupport::minimal_pick_place();
    doc["task"]["type"] = "Clean&Place";
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    const auto mug = *s.find_by_name("mug_1");
    s.objects[mug].location = Location::inside(*s.find_by_name("cabinet_1"));
    auto st = check_goal(s, sc.goals);
    CHECK(st.satisfied == st.total - 1);
    CHECK_FALSE(st.success);
    s.objects[mug].flags.clean = true;
    st = check_goal(s, sc.goals);
    CHECK(st.satisfied == st.total);
    CHECK(st.success);
}

TEST_CASE("goal conditions per task type") {
    // Reference enumeration of condition counts.
    const std::vector<std::pair<TaskType, int>> expected = {
        {TaskType::PickPlace, 2},  {TaskType::StackPlace, 3}, {TaskType::PickTwoPlace, 4},
        {TaskType::CleanPlace, 2}, {TaskType::HeatPlace, 2},  {TaskType::CoolPlace, 2},
        {TaskType::ExamineInLight, 2},
    };
    for (const auto& [t, n] : expected) {
        CHECK(default_conditions(t, false).size() == static_cast<std::size_t>(n));
        CHECK(default_conditions(t, true).size() == static_cast<std::size_t>(n + 1));
        CHECK(parse_task_type(to_string(t)) == t);
    }
}

TEST_CASE("pick two counts distinct instances") {
    json doc = testsupport::minimal_pick_place();
    doc["objects"].push_back({{"id", "mug_2"}, {"class", "Mug"}, {"in", "countertop_1"}});
    doc["task"]["type"] = "PickTwo&Place";
    Scenario sc = load_scenario(doc);
    WorldState s = sc.initial;
    const auto cab = *s.find_by_name("cabinet_1");
    const auto m1 = *s.find_by_name("mug_1");
    s.objects[m1].location = Location::inside(cab);
    s.objects[m1].flags.picked_up = true;
    CHECK(check_goal(s, sc.goals).satisfied == 2);
    const auto m2 = *s.find_by_name("mug_2");
    s.objects[m2].location = Location::inside(cab);
    s.objects[m2].flags.picked_up = true;
    CHECK(check_goal(s, sc.goals).success);
}

TEST_CASE("expert length: adjacent pickup is one action") {
    json doc = testsupport::minimal_pick_place();
    doc["agent"] = {{"cell", cell(2, 1)}, {"heading", "N"}};
    doc["goals"] = json::array({{{"kind", "picked"}}});
    CHECK(expert_path_length(load_scenario(doc)) == 1);
}

TEST_CASE("expert length: three free cells then a pickup") {
    json doc = testsupport::minimal_pick_place();
    doc["grid"] = testsupport::open_room(3, 7);
    doc["receptacles"] = json::array();
    doc["objects"] = json::array({{{"id", "mug_1"}, {"class", "Mug"}, {"cell", cell(1, 5)}}});
    doc["agent"] = {{"cell", cell(1, 1)}, {"heading", "E"}};
    doc["goals"] = json::array({{{"kind", "picked"}}});
    const Scenario sc = load_scenario(doc);
    // Reference: straight corridor, already facing the mug: (distance - 1) moves + 1 pickup.
    const int reference = (manhattan({1, 1}, {1, 5}) - 1) + 1;
    CHECK(reference == 4);
    const ExpertPlan plan = expert_plan(sc);
    CHECK(plan.length() == reference);
    WorldState s = sc.initial;
    for (const auto& a : plan.actions) REQUIRE(apply_step(s, a).success);
    CHECK(check_goal(s, sc.goals).success);
}

TEST_CASE("expert length on the minimal pick and place") {
    // Hand count: two moves north, turn west, pick, two turns east, put.
    CHECK(expert_path_length(load_scenario(testsupport::minimal_pick_place())) == 7);
}

TEST_CASE("sealed box has no expert trajectory") {
    json doc = testsupport::minimal_pick_place();
    doc["receptacles"][0] = {{"id", "box_1"}, {"class", "Box"}, {"cell", cell(1, 1)}, {"openable", false}, {"open", false}};
    doc["objects"][0]["in"] = "box_1";
    const Scenario sc = load_scenario(doc);
    CHECK_THROWS_WITH_AS(expert_path_length(sc), "no expert trajectory", ExpertError);
}

TEST_CASE("random rollouts: determinism, failure non-mutation, single held object, monotone flags") {
    json doc = sink_scene();
    doc["objects"].push_back({{"id", "cup_1"}, {"class", "Cup"}, {"in", "countertop_1"}});
    doc["receptacles"].push_back({{"id", "fridge_1"}, {"class", "Fridge"}, {"cell", cell(3, 3)}});
    Scenario sc = load_scenario(doc);
    std::vector<ObjectId> handles;
    for (std::size_t i = 0; i < sc.initial.object_count(); ++i) handles.push_back(sc.initial.info(static_cast<ObjectIndex>(i)).handle);

    for (std::uint32_t seed = 0; seed < 50; ++seed) {
        std::mt19937 rng(seed);
        std::vector<LowLevelAction> actions;
        for (int k = 0; k < 200; ++k) {
            const auto kind = static_cast<ActionKind>(rng() % 12);
            actions.push_back({kind, is_interaction(kind) ? std::optional<ObjectId>(handles[rng() % handles.size()]) : std::nullopt});
        }
        auto run = [&] {
            Simulator sim(sc);
            std::vector<std::uint64_t> digests;
            for (const auto& a : actions) {
                const WorldState before = sim.state();
                const auto out = sim.step(a);
                const WorldState& after = sim.state();
                if (!out.success) {
                    CHECK(after.same_world(before));
                    CHECK_FALSE(out.error.empty());
                }
                CHECK(after.step_count == before.step_count + 1);
                int held = 0;
                for (const auto& o : after.objects) held += o.location.kind == Location::Kind::Held ? 1 : 0;
                CHECK(held == (after.held ? 1 : 0));
                CHECK(after.traversable(after.agent.cell));
                for (std::size_t i = 0; i < after.object_count(); ++i) {
                    CHECK((after.objects[i].flags.clean || !before.objects[i].flags.clean));
                    CHECK((after.objects[i].flags.hot || !before.objects[i].flags.hot));
                    CHECK((after.objects[i].flags.cold || !before.objects[i].flags.cold));
                    CHECK((after.objects[i].flags.sliced || !before.objects[i].flags.sliced));
                }
                CHECK(check_goal(after, sc.goals).satisfied >= 0);
                digests.push_back(sim.observe().digest);
            }
            return std::pair{sim.state(), digests};
        };
        const auto a = run();
        const auto b = run();
        CHECK(a.first.same_world(b.first));
        CHECK(a.second == b.second);
    }
}

TEST_CASE("digest tracks visible facts") {
    Scenario sc = load_scenario(testsupport::minimal_pick_place());
    WorldState s = sc.initial;
    const auto d0 = scene_digest(s);
    auto [moved, out] = step(s, act(ActionKind::MoveAhead));
    CHECK(out.success);
    CHECK(scene_digest(moved) != d0);
    WorldState blocked = moved;
    apply_step(blocked, act(ActionKind::MoveAhead));
    apply_step(blocked, act(ActionKind::MoveAhead));
    const auto d1 = scene_digest(blocked);
    apply_step(blocked, act(ActionKind::MoveAhead));
    CHECK(scene_digest(blocked) == d1);
    WorldState picked = moved;
    apply_step(picked, act(ActionKind::MoveAhead));
    apply_step(picked, act(ActionKind::RotateLeft));
    const auto d2 = scene_digest(picked);
    REQUIRE(apply_step(picked, act(ActionKind::PickupObject, picked, "mug_1")).success);
    CHECK(scene_digest(picked) != d2);
}
