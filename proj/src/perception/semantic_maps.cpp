#include "opex/perception/semantic_maps.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace opex::perception {

std::string_view to_string(MapSource s) { return s == MapSource::MPrime ? "M'" : "M"; }

namespace {

std::uint32_t lookup(const std::vector<std::pair<ClassId, std::uint32_t>>& v, ClassId cls) {
    for (const auto& [c, n] : v)
        if (c == cls) return n;
    return 0;
}

}  // namespace

std::optional<ClassId> SemanticMaps::Track::majority() const {
    std::optional<ClassId> best;
    std::uint32_t best_n = 0;
    bool tied = false;
    for (const auto& [cls, n] : counts) {
        const std::uint32_t eff = n - lookup(baseline, cls);
        if (eff == 0) continue;
        if (eff > best_n) {
            best = cls;
            best_n = eff;
            tied = false;
        } else if (eff == best_n) {
            tied = true;
        }
    }
    if (tied) return std::nullopt;
    return best;
}

SemanticMaps::SemanticMaps(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      cells_(static_cast<std::size_t>(rows) * cols),
      explored_(rows, cols),
      collisions_(rows, cols) {}

void SemanticMaps::update(const sim::EgocentricObservation& obs) {
    for (const Cell c : obs.visible_cells) {
        explored_.set(c, true);
        CellData& cd = cells_[index(c)];
        cd.instant.clear();
        cd.instant_labels.clear();
    }
    for (const sim::Detection& d : obs.detections) {
        CellData& cd = cells_[index(d.cell)];
        cd.instant.push_back({d.cell, d.handle, d.elevation});
        cd.instant_labels.push_back(d.label);
        auto it = std::find_if(cd.tracks.begin(), cd.tracks.end(), [&](const Track& t) { return t.handle == d.handle; });
        if (it == cd.tracks.end()) {
            cd.tracks.push_back({});
            it = std::prev(cd.tracks.end());
            it->handle = d.handle;
        }
        it->elevation = d.elevation;
        auto slot = std::find_if(it->counts.begin(), it->counts.end(), [&](const auto& p) { return p.first == d.label; });
        if (slot == it->counts.end()) it->counts.emplace_back(d.label, 1);
        else ++slot->second;
    }
    if (obs.held) note_removed(*obs.held);
}

void SemanticMaps::note_removed(ObjectId handle) {
    if (handle == sim::kStructuralHandle) return;
    for (CellData& cd : cells_) {
        for (Track& t : cd.tracks)
            if (t.handle == handle) t.baseline = t.counts;
        for (std::size_t i = cd.instant.size(); i-- > 0;)
            if (cd.instant[i].handle == handle) {
                cd.instant.erase(cd.instant.begin() + static_cast<long>(i));
                cd.instant_labels.erase(cd.instant_labels.begin() + static_cast<long>(i));
            }
    }
}

void SemanticMaps::note_collision(Cell c) {
    if (collisions_.in_bounds(c)) collisions_.set(c, true);
}

std::uint32_t SemanticMaps::votes(Cell c, ClassId cls) const {
    std::uint32_t n = 0;
    for (const Track& t : cells_[index(c)].tracks) n += lookup(t.counts, cls);
    return n;
}

std::vector<ClassId> SemanticMaps::instant_labels(Cell c) const { return cells_[index(c)].instant_labels; }

std::vector<ClassId> SemanticMaps::majority_labels(Cell c) const {
    std::vector<ClassId> out;
    for (const Track& t : cells_[index(c)].tracks)
        if (auto m = t.majority()) out.push_back(*m);
    return out;
}

std::optional<LocateResult> SemanticMaps::locate(ClassId cls, bool use_mprime) const {
    if (use_mprime) {
        LocateResult r{MapSource::MPrime, {}};
        for (std::size_t i = 0; i < cells_.size(); ++i)
            for (const Track& t : cells_[i].tracks)
                if (t.majority() == cls)
                    r.candidates.push_back({{static_cast<int>(i / cols_), static_cast<int>(i % cols_)}, t.handle, t.elevation});
        if (!r.candidates.empty()) return r;
    }
    LocateResult r{MapSource::M, {}};
    for (const CellData& cd : cells_)
        for (std::size_t k = 0; k < cd.instant.size(); ++k)
            if (cd.instant_labels[k] == cls) r.candidates.push_back(cd.instant[k]);
    if (r.candidates.empty()) return std::nullopt;
    return r;
}

std::optional<Candidate> SemanticMaps::find_instance(ObjectId handle, bool use_mprime) const {
    if (use_mprime)
        for (std::size_t i = 0; i < cells_.size(); ++i)
            for (const Track& t : cells_[i].tracks)
                if (t.handle == handle && t.majority())
                    return Candidate{{static_cast<int>(i / cols_), static_cast<int>(i % cols_)}, handle, t.elevation};
    for (const CellData& cd : cells_)
        for (const Candidate& c : cd.instant)
            if (c.handle == handle) return c;
    return std::nullopt;
}

std::optional<ClassId> SemanticMaps::label_of(ObjectId handle, bool use_mprime) const {
    for (const CellData& cd : cells_) {
        if (use_mprime)
            for (const Track& t : cd.tracks)
                if (t.handle == handle)
                    if (auto m = t.majority()) return m;
    }
    for (const CellData& cd : cells_)
        for (std::size_t k = 0; k < cd.instant.size(); ++k)
            if (cd.instant[k].handle == handle) return cd.instant_labels[k];
    return std::nullopt;
}

std::vector<ClassId> SemanticMaps::effective_labels(Cell c, bool use_mprime) const {
    if (use_mprime) {
        auto m = majority_labels(c);
        if (!m.empty()) return m;
    }
    return instant_labels(c);
}

CellMask SemanticMaps::traversable(bool optimistic_unknown, bool use_mprime) const {
    CellMask out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) {
            const Cell cell{r, c};
            if (collisions_.at(cell)) continue;
            if (!explored_.at(cell)) {
                out.set(cell, optimistic_unknown);
                continue;
            }
            const auto labels = effective_labels(cell, use_mprime);
            out.set(cell, std::none_of(labels.begin(), labels.end(), [](ClassId l) { return sim::label_blocks(l); }));
        }
    return out;
}

std::string SemanticMaps::dump() const {
    auto glyph = [](const std::vector<ClassId>& labels, bool explored) {
        if (!explored) return '?';
        char g = '.';
        int objects = 0;
        for (ClassId l : labels) {
            if (l == sim::wall_class()) {
                if (objects == 0) g = '#';
            } else if (l != sim::floor_class()) {
                g = sim::class_name(l)[0];
                ++objects;
            }
        }
        return objects > 1 ? '*' : g;
    };
    std::ostringstream os;
    os << "M\n";
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) os << glyph(instant_labels({r, c}), explored_.at({r, c}));
        os << '\n';
    }
    os << "M'\n";
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) os << glyph(majority_labels({r, c}), explored_.at({r, c}));
        os << '\n';
    }
    os << "votes\n";
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) {
            std::map<std::string, std::uint32_t> totals;
            for (const Track& t : cells_[index({r, c})].tracks)
                for (const auto& [cls, n] : t.counts) totals[std::string(sim::class_name(cls))] += n;
            if (totals.empty()) continue;
            os << r << ',' << c << ':';
            for (const auto& [name, n] : totals) os << ' ' << name << '=' << n;
            os << '\n';
        }
    return os.str();
}

}  // namespace opex::perception
