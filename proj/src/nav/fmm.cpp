#include "opex/nav/fmm.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace opex::nav {
namespace {

double solve(double a, double b) {
    if (a > b) std::swap(a, b);
    if (b == kUnreachable || b - a >= 1.0) return a + 1.0;
    return 0.5 * (a + b + std::sqrt(2.0 - (a - b) * (a - b)));
}

}  // namespace

double eikonal_update(const DistanceField& f, Cell c) {
    const double a = std::min(f.at({c.row, c.col - 1}), f.at({c.row, c.col + 1}));
    const double b = std::min(f.at({c.row - 1, c.col}), f.at({c.row + 1, c.col}));
    if (a == kUnreachable && b == kUnreachable) return kUnreachable;
    return solve(a, b);
}

DistanceField fmm_distance_field(const CellMask& traversable, const std::vector<Cell>& goals) {
    if (goals.empty()) throw std::invalid_argument("fmm: empty goal set");
    DistanceField f{traversable.rows, traversable.cols,
                    std::vector<double>(static_cast<std::size_t>(traversable.rows) * traversable.cols, kUnreachable)};
    std::vector<std::uint8_t> frozen(f.values.size(), 0);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (const Cell g : goals) {
        if (!traversable.at(g)) throw std::invalid_argument("fmm: goal cell not traversable");
        const std::size_t i = static_cast<std::size_t>(g.row) * f.cols + g.col;
        f.values[i] = 0.0;
        heap.emplace(0.0, i);
    }
    constexpr int dr[4] = {-1, 0, 1, 0};
    constexpr int dc[4] = {0, 1, 0, -1};
    while (!heap.empty()) {
        const auto [d, i] = heap.top();
        heap.pop();
        if (frozen[i] || d > f.values[i]) continue;
        frozen[i] = 1;
        const Cell c{static_cast<int>(i / f.cols), static_cast<int>(i % f.cols)};
        for (int k = 0; k < 4; ++k) {
            const Cell n{c.row + dr[k], c.col + dc[k]};
            if (!traversable.at(n)) continue;
            const std::size_t j = static_cast<std::size_t>(n.row) * f.cols + n.col;
            if (frozen[j]) continue;
            // Only frozen neighbours feed the update (upwind).
            auto known = [&](Cell x) {
                if (!f.in_bounds(x)) return kUnreachable;
                const std::size_t xi = static_cast<std::size_t>(x.row) * f.cols + x.col;
                return frozen[xi] ? f.values[xi] : kUnreachable;
            };
            const double a = std::min(known({n.row, n.col - 1}), known({n.row, n.col + 1}));
            const double b = std::min(known({n.row - 1, n.col}), known({n.row + 1, n.col}));
            const double u = solve(a, b);
            if (u < f.values[j]) {
                f.values[j] = u;
                heap.emplace(u, j);
            }
        }
    }
    return f;
}

std::string DistanceField::render(int precision) const {
    std::ostringstream os;
    char buf[32];
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = at({r, c});
            if (v == kUnreachable) std::snprintf(buf, sizeof buf, "%*s", precision + 5, "inf");
            else std::snprintf(buf, sizeof buf, "%*.*f", precision + 5, precision, v);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace opex::nav
