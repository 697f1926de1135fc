#include "opex/sim/observation.hpp"

#include <algorithm>
#include <tuple>

#include "opex/common/hashing.hpp"

namespace opex::sim {
namespace {

std::uint64_t pack_flags(const ObjectFlags& f, bool open) {
    return (f.clean ? 1U : 0U) | (f.hot ? 2U : 0U) | (f.cold ? 4U : 0U) | (f.sliced ? 8U : 0U) |
           (f.toggled_on ? 16U : 0U) | (open ? 32U : 0U);
}

std::uint64_t zigzag(int v) { return static_cast<std::uint64_t>(v >= 0 ? 2 * v : -2 * v - 1); }

}  // namespace

double noise_draw(std::uint64_t rng_seed, std::uint64_t key, NoiseDraw purpose) {
    return unit_interval(mix64(rng_seed, key, static_cast<std::uint64_t>(purpose)));
}

std::uint64_t structural_key(Cell c) {
    return 0x5ec0000000000000ULL ^ (static_cast<std::uint64_t>(c.row) << 20) ^ static_cast<std::uint64_t>(c.col);
}

std::uint64_t scene_digest(const WorldState& s) {
    const CellMask view = visible_cells(s.grid(), s.agent, s.layout->view_distance);
    using Fact = std::tuple<int, int, std::uint64_t, std::uint64_t>;  // forward, lateral, kind, payload
    std::vector<Fact> facts;
    for (int r = 0; r < view.rows; ++r)
        for (int c = 0; c < view.cols; ++c) {
            if (!view.at({r, c})) continue;
            const Egocentric e = to_egocentric(s.agent.cell, s.agent.heading, {r, c});
            facts.emplace_back(e.forward, e.lateral, 0, s.grid().is_wall({r, c}) ? 1 : 0);
        }
    for (std::size_t i = 0; i < s.object_count(); ++i) {
        const auto idx = static_cast<ObjectIndex>(i);
        if (!object_visible(s, idx, view)) continue;
        const Egocentric e = to_egocentric(s.agent.cell, s.agent.heading, *s.cell_of(idx));
        const ObjectState& o = s.objects[i];
        facts.emplace_back(e.forward, e.lateral, 1 + s.info(idx).cls, pack_flags(o.flags, o.open));
    }
    std::sort(facts.begin(), facts.end());
    Fnv1a h;
    for (const auto& [f, l, kind, payload] : facts) h.add(zigzag(f)).add(zigzag(l)).add(kind).add(payload);
    h.add(static_cast<std::uint64_t>(s.agent.pitch));
    if (s.held) {
        h.add(1 + static_cast<std::uint64_t>(s.info(*s.held).cls));
        h.add(pack_flags(s.objects[*s.held].flags, s.objects[*s.held].open));
    } else {
        h.add(std::uint64_t{0});
    }
    return h.value();
}

EgocentricObservation observe(const WorldState& s, const NoiseConfig& noise, std::uint64_t rng_seed) {
    EgocentricObservation obs;
    obs.pose = s.agent;
    const CellMask view = visible_cells(s.grid(), s.agent, s.layout->view_distance);

    auto mislabel = [&](ClassId label, std::uint64_t key) {
        if (noise.mislabel <= 0.0) return label;
        const auto it = noise.confusion.find(label);
        if (it == noise.confusion.end() || it->second.empty()) return label;
        if (noise_draw(rng_seed, key, NoiseDraw::Mislabel) >= noise.mislabel) return label;
        const auto n = it->second.size();
        auto pick = static_cast<std::size_t>(noise_draw(rng_seed, key, NoiseDraw::Choice) * static_cast<double>(n));
        return it->second[std::min(pick, n - 1)];
    };

    std::vector<std::uint8_t> occupied(view.bits.size(), 0);
    for (std::size_t i = 0; i < s.object_count(); ++i) {
        const auto idx = static_cast<ObjectIndex>(i);
        if (const auto c = s.cell_of(idx); c && s.objects[i].location.kind == Location::Kind::AtCell)
            occupied[s.grid().index(*c)] = 1;
        if (!object_visible(s, idx, view)) continue;
        const ObjectStatic& info = s.info(idx);
        if (noise.drop > 0.0 && noise_draw(rng_seed, info.handle, NoiseDraw::Drop) < noise.drop) continue;
        Detection d;
        d.label = mislabel(info.cls, info.handle);
        d.cell = *s.cell_of(idx);
        d.handle = info.handle;
        d.elevation = s.reach_elevation(idx);
        d.open = s.objects[i].open;
        d.flags = s.objects[i].flags;
        obs.detections.push_back(d);
    }
    for (int r = 0; r < view.rows; ++r)
        for (int c = 0; c < view.cols; ++c) {
            const Cell cell{r, c};
            if (!view.at(cell)) continue;
            obs.visible_cells.push_back(cell);
            if (occupied[s.grid().index(cell)]) continue;
            Detection d;
            d.cell = cell;
            d.label = mislabel(s.grid().is_wall(cell) ? wall_class() : floor_class(), structural_key(cell));
            obs.detections.push_back(d);
        }
    obs.digest = scene_digest(s);
    if (s.held) {
        obs.held = s.info(*s.held).handle;
        obs.held_class = s.info(*s.held).cls;
    }
    return obs;
}

}  // namespace opex::sim
