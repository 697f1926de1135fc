#include <doctest.h>

#include <cmath>
#include <random>

#include "opex/perception/semantic_maps.hpp"

using namespace opex::perception;
using opex::sim::Detection;
using opex::sim::EgocentricObservation;

namespace {

ClassId cls(const char* name) { return opex::sim::require_class(name); }

EgocentricObservation frame(std::vector<Cell> visible, std::vector<Detection> dets) {
    EgocentricObservation o;
    o.visible_cells = std::move(visible);
    o.detections = std::move(dets);
    return o;
}

Detection det(const char* label, Cell c, ObjectId handle) {
    Detection d;
    d.label = cls(label);
    d.cell = c;
    d.handle = handle;
    return d;
}

}  // namespace

TEST_CASE("an empty observation only extends the explored mask") {
    SemanticMaps m(4, 4);
    m.update(frame({{1, 1}, {1, 2}}, {}));
    CHECK(m.explored().count() == 2);
    CHECK(m.instant_labels({1, 1}).empty());
    CHECK(m.majority_labels({1, 1}).empty());
    CHECK_FALSE(m.locate(cls("Mug")).has_value());
}

TEST_CASE("majority over one track and the tie rule") {
    SemanticMaps m(4, 4);
    const Cell c{2, 2};
    for (int i = 0; i < 3; ++i) m.update(frame({c}, {det("Fridge", c, 77)}));
    m.update(frame({c}, {det("Wall", c, 77)}));
    CHECK(m.majority_labels(c) == std::vector<ClassId>{cls("Fridge")});
    CHECK(m.votes(c, cls("Fridge")) == 3);
    CHECK(m.votes(c, cls("Wall")) == 1);

    SemanticMaps t(4, 4);
    for (int i = 0; i < 2; ++i) t.update(frame({c}, {det("Fridge", c, 77)}));
    for (int i = 0; i < 2; ++i) t.update(frame({c}, {det("Wall", c, 77)}));
    CHECK(t.majority_labels(c).empty());
    CHECK(t.instant_labels(c) == std::vector<ClassId>{cls("Wall")});
    CHECK(t.effective_labels(c) == std::vector<ClassId>{cls("Wall")});
}

TEST_CASE("locate cascades from M' to M") {
    SemanticMaps m(5, 5);
    // Mug voted at (1,1); the same class appears only in M at (3,3) under another handle.
    for (int i = 0; i < 2; ++i) m.update(frame({{1, 1}}, {det("Mug", {1, 1}, 5)}));
    m.update(frame({{3, 3}, {1, 1}}, {det("Mug", {3, 3}, 6), det("Cup", {1, 1}, 5)}));
    auto r = m.locate(cls("Mug"));
    REQUIRE(r.has_value());
    CHECK(r->source == MapSource::MPrime);
    REQUIRE(r->candidates.size() == 2);  // (1,1) by 2:1 majority and (3,3) by 1:0
    CHECK(r->candidates[0].cell == Cell{1, 1});

    SemanticMaps only_m(5, 5);
    only_m.update(frame({{2, 2}}, {det("Apple", {2, 2}, 9)}));
    only_m.update(frame({{2, 2}}, {det("Tomato", {2, 2}, 9)}));
    CHECK(only_m.majority_labels({2, 2}).empty());
    auto r2 = only_m.locate(cls("Tomato"));
    REQUIRE(r2.has_value());
    CHECK(r2->source == MapSource::M);
    CHECK(r2->candidates[0].cell == Cell{2, 2});

    SemanticMaps fresh(3, 3);
    CHECK_FALSE(fresh.locate(cls("Mug")).has_value());

    auto m_only = m.locate(cls("Mug"), false);
    REQUIRE(m_only.has_value());
    CHECK(m_only->source == MapSource::M);
    CHECK(m_only->candidates.size() == 1);
    CHECK(m_only->candidates[0].cell == Cell{3, 3});
}

TEST_CASE("cascade returns M only when M' has no cell of the class") {
    std::mt19937 rng(11);
    const std::vector<const char*> labels = {"Mug", "Cup", "Wall", "Floor"};
    for (int trial = 0; trial < 200; ++trial) {
        SemanticMaps m(3, 3);
        for (int k = 0; k < 6; ++k) {
            std::vector<Detection> dets;
            std::vector<Cell> vis;
            for (int i = 0; i < 3; ++i) {
                const Cell c{static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)};
                if (std::find(vis.begin(), vis.end(), c) != vis.end()) continue;
                vis.push_back(c);
                dets.push_back(det(labels[rng() % labels.size()], c, 100 + c.row * 3 + c.col));
            }
            m.update(frame(vis, dets));
        }
        for (const char* l : labels) {
            auto r = m.locate(cls(l));
            bool in_mprime = false;
            for (int rr = 0; rr < 3; ++rr)
                for (int cc = 0; cc < 3; ++cc)
                    for (ClassId x : m.majority_labels({rr, cc})) in_mprime |= x == cls(l);
            if (r && r->source == MapSource::M) CHECK_FALSE(in_mprime);
            if (in_mprime) CHECK((r && r->source == MapSource::MPrime));
        }
    }
}

TEST_CASE("traversability") {
    SemanticMaps m(3, 3);
    CHECK(m.traversable(true).count() == 9);
    CHECK(m.traversable(false).count() == 0);

    m.update(frame({{1, 1}, {1, 2}}, {det("Wall", {1, 1}, 0), det("Floor", {1, 2}, 0)}));
    auto t = m.traversable(true);
    CHECK_FALSE(t.at({1, 1}));
    CHECK(t.at({1, 2}));

    SemanticMaps noisy(3, 3);
    noisy.update(frame({{0, 0}}, {det("Wall", {0, 0}, 0)}));
    CHECK_FALSE(noisy.traversable(false).at({0, 0}));
    for (int i = 0; i < 3; ++i) noisy.update(frame({{0, 0}}, {det("Floor", {0, 0}, 0)}));
    // Reference: floor votes 3 > wall votes 1.
    CHECK(noisy.votes({0, 0}, cls("Floor")) > noisy.votes({0, 0}, cls("Wall")));
    CHECK(noisy.traversable(false).at({0, 0}));

    noisy.note_collision({0, 0});
    CHECK_FALSE(noisy.traversable(true).at({0, 0}));
}

TEST_CASE("removing a picked object keeps counters but clears both views") {
    SemanticMaps m(3, 3);
    m.update(frame({{1, 1}}, {det("Mug", {1, 1}, 4), det("CounterTop", {1, 1}, 3)}));
    m.note_removed(4);
    CHECK(m.votes({1, 1}, cls("Mug")) == 1);
    CHECK_FALSE(m.locate(cls("Mug")).has_value());
    CHECK(m.majority_labels({1, 1}) == std::vector<ClassId>{cls("CounterTop")});
    m.update(frame({{1, 1}}, {det("Mug", {1, 1}, 4), det("CounterTop", {1, 1}, 3)}));
    CHECK(m.locate(cls("Mug")).has_value());
}

TEST_CASE("vote counters never decrease and explored covers every visible cell") {
    std::mt19937 rng(5);
    const std::vector<const char*> labels = {"Mug", "Cup", "Fridge", "Wall", "Floor"};
    SemanticMaps m(4, 4);
    std::vector<std::uint32_t> prev(16 * labels.size(), 0);
    for (int k = 0; k < 300; ++k) {
        std::vector<Detection> dets;
        std::vector<Cell> vis;
        for (int i = 0; i < 4; ++i) {
            const Cell c{static_cast<int>(rng() % 4), static_cast<int>(rng() % 4)};
            vis.push_back(c);
            dets.push_back(det(labels[rng() % labels.size()], c, rng() % 3));
        }
        if (rng() % 7 == 0) m.note_removed(rng() % 3);
        m.update(frame(vis, dets));
        for (const Cell c : vis) CHECK(m.explored().at(c));
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                for (std::size_t l = 0; l < labels.size(); ++l) {
                    const auto v = m.votes({r, c}, cls(labels[l]));
                    auto& p = prev[(r * 4 + c) * labels.size() + l];
                    CHECK(v >= p);
                    p = v;
                }
    }
}

TEST_CASE("majority view error rate stays under the binomial tail") {
    // Two-class channel with symmetric flip probability p, n observations per cell.
    const double p = 0.2;
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution flip(p);
    for (int n : {5, 7, 9}) {
        double tail = 0.0;  // P[Bin(n, p) >= n/2]
        for (int k = 0; k <= n; ++k)
            if (2 * k >= n) tail += std::tgamma(n + 1) / (std::tgamma(k + 1) * std::tgamma(n - k + 1)) * std::pow(p, k) * std::pow(1 - p, n - k);
        const int cells = 4000;
        int wrong_mprime = 0, wrong_m = 0;
        for (int t = 0; t < cells; ++t) {
            SemanticMaps m(1, 1);
            for (int i = 0; i < n; ++i) m.update(frame({{0, 0}}, {det(flip(rng) ? "Cup" : "Mug", {0, 0}, 1)}));
            const auto maj = m.majority_labels({0, 0});
            wrong_mprime += (maj.size() != 1 || maj[0] != cls("Mug")) ? 1 : 0;
            wrong_m += m.instant_labels({0, 0})[0] != cls("Mug") ? 1 : 0;
        }
        const double rate = static_cast<double>(wrong_mprime) / cells;
        const double se = std::sqrt(tail * (1 - tail) / cells);
        CHECK(rate <= tail + 4 * se + 1e-3);
        CHECK(wrong_mprime <= wrong_m);
    }
}

TEST_CASE("dump renders both views and the counters") {
    SemanticMaps m(2, 3);
    m.update(frame({{0, 0}, {0, 1}}, {det("Wall", {0, 0}, 0), det("Fridge", {0, 1}, 8)}));
    const std::string d = m.dump();
    CHECK(d.find("M\n#F?\n???\n") != std::string::npos);
    CHECK(d.find("M'\n#F?\n") != std::string::npos);
    CHECK(d.find("0,1: Fridge=1") != std::string::npos);
}
