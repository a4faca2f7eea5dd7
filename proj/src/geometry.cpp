#include "rpack/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rpack {

const char* violation_name(Violation v) {
    switch (v) {
    case Violation::None: return "none";
    case Violation::Containment: return "containment";
    case Violation::Overlap: return "overlap";
    case Violation::Stability: return "stability";
    }
    return "unknown";
}

void subtract_box(std::vector<Box>& spaces, const Box& placed) {
    std::vector<Box> next;
    next.reserve(spaces.size() + 6);
    for (const Box& s : spaces) {
        if (!s.overlaps(placed)) {
            next.push_back(s);
            continue;
        }
        // Residual slabs on each side of the cut; degenerate ones are skipped.
        if (placed.x > s.x + kGeomEps)
            next.push_back(Box{s.x, s.y, s.z, placed.x - s.x, s.d, s.h});
        if (s.x2() > placed.x2() + kGeomEps)
            next.push_back(Box{placed.x2(), s.y, s.z, s.x2() - placed.x2(), s.d, s.h});
        if (placed.y > s.y + kGeomEps)
            next.push_back(Box{s.x, s.y, s.z, s.w, placed.y - s.y, s.h});
        if (s.y2() > placed.y2() + kGeomEps)
            next.push_back(Box{s.x, placed.y2(), s.z, s.w, s.y2() - placed.y2(), s.h});
        if (placed.z > s.z + kGeomEps)
            next.push_back(Box{s.x, s.y, s.z, s.w, s.d, placed.z - s.z});
        if (s.z2() > placed.z2() + kGeomEps)
            next.push_back(Box{s.x, s.y, placed.z2(), s.w, s.d, s.z2() - placed.z2()});
    }
    // Drop spaces contained in another (duplicates keep their first copy).
    std::vector<Box> filtered;
    filtered.reserve(next.size());
    for (size_t i = 0; i < next.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < next.size() && !dominated; ++j) {
            if (i == j) continue;
            if (next[j].contains(next[i])) {
                // Equal boxes dominate each other; keep the lower index.
                if (next[i].contains(next[j]) && i < j) continue;
                dominated = true;
            }
        }
        if (!dominated) filtered.push_back(next[i]);
    }
    spaces = std::move(filtered);
}

BinState::BinState(Container c) : container_(c) {
    spaces_.push_back(c.as_box());
    if (container_.mode == Mode::Discrete) {
        gx_ = static_cast<int>(std::lround(container_.sx));
        gy_ = static_cast<int>(std::lround(container_.sy));
        heightmap_.assign(static_cast<size_t>(gx_) * gy_, 0.0);
    }
}

double BinState::height_at(double x, double y) const {
    if (container_.mode == Mode::Discrete && !heightmap_.empty()) {
        int cx = static_cast<int>(std::floor(x));
        int cy = static_cast<int>(std::floor(y));
        if (cx < 0 || cy < 0 || cx >= gx_ || cy >= gy_) return 0.0;
        return heightmap_[static_cast<size_t>(cx) * gy_ + cy];
    }
    double top = 0.0;
    for (const PlacedItem& p : packed_) {
        const Box b = p.box();
        if (x > b.x - kGeomEps && x < b.x2() - kGeomEps && y > b.y - kGeomEps &&
            y < b.y2() - kGeomEps)
            top = std::max(top, b.z2());
    }
    return top;
}

double BinState::cell_height(int cx, int cy) const {
    return heightmap_[static_cast<size_t>(cx) * gy_ + cy];
}

void BinState::place(const Item& item, const Vec3& at) {
    packed_.push_back(PlacedItem{item, at});
    packed_volume_ += item.volume();
    const Box b = packed_.back().box();
    subtract_box(spaces_, b);
    if (container_.mode == Mode::Discrete && !heightmap_.empty()) {
        int x0 = static_cast<int>(std::lround(b.x));
        int x1 = static_cast<int>(std::lround(b.x2()));
        int y0 = static_cast<int>(std::lround(b.y));
        int y1 = static_cast<int>(std::lround(b.y2()));
        for (int cx = x0; cx < x1; ++cx)
            for (int cy = y0; cy < y1; ++cy) {
                double& cell = heightmap_[static_cast<size_t>(cx) * gy_ + cy];
                cell = std::max(cell, b.z2());
            }
    }
    if (!queue_.empty() && queue_.front().id == item.id) queue_.erase(queue_.begin());
}

double drop_z(const BinState& state, const Item& item, double x, double y) {
    const Container& c = state.container();
    if (x < -kGeomEps || y < -kGeomEps || x + item.w > c.sx + kGeomEps ||
        y + item.d > c.sy + kGeomEps)
        throw Error("footprint_out_of_bounds", "drop_z: item footprint exceeds container");

    // The minimal non-overlapping z is 0 or the top face of a box whose
    // footprint meets the item's.
    Box probe{x, y, 0, item.w, item.d, item.h};
    std::vector<double> levels{0.0};
    for (const PlacedItem& p : state.packed()) {
        const Box b = p.box();
        if (probe.overlaps_xy(b)) levels.push_back(b.z2());
    }
    std::sort(levels.begin(), levels.end());
    for (double z : levels) {
        probe.z = z;
        bool clear = true;
        for (const PlacedItem& p : state.packed()) {
            if (probe.overlaps(p.box())) {
                clear = false;
                break;
            }
        }
        if (clear) return z;
    }
    return levels.back(); // unreachable: the topmost level is always clear
}

bool stable(const BinState& state, const Item& item, const Vec3& at) {
    return stable(state, item, at, state.container().tau);
}

bool stable(const BinState& state, const Item& item, const Vec3& at, double tau) {
    if (std::abs(at.z) <= kGeomEps) return true;

    const Box base{at.x, at.y, at.z, item.w, item.d, item.h};
    double contact_area = 0.0;
    double cx0 = 0, cx1 = 0, cy0 = 0, cy1 = 0;
    bool any = false;
    for (const PlacedItem& p : state.packed()) {
        const Box b = p.box();
        if (std::abs(b.z2() - at.z) > kGeomEps) continue;
        const double ox0 = std::max(base.x, b.x), ox1 = std::min(base.x2(), b.x2());
        const double oy0 = std::max(base.y, b.y), oy1 = std::min(base.y2(), b.y2());
        if (ox1 - ox0 <= kGeomEps || oy1 - oy0 <= kGeomEps) continue;
        contact_area += (ox1 - ox0) * (oy1 - oy0);
        if (!any) {
            cx0 = ox0; cx1 = ox1; cy0 = oy0; cy1 = oy1;
            any = true;
        } else {
            cx0 = std::min(cx0, ox0); cx1 = std::max(cx1, ox1);
            cy0 = std::min(cy0, oy0); cy1 = std::max(cy1, oy1);
        }
    }
    if (!any) return false;
    const double ratio = contact_area / (item.w * item.d);
    if (ratio + kGeomEps < tau) return false;
    // Uniform density: center of mass projects to the footprint center.
    const double mx = at.x + item.w / 2, my = at.y + item.d / 2;
    return mx >= cx0 - kGeomEps && mx <= cx1 + kGeomEps && my >= cy0 - kGeomEps &&
           my <= cy1 + kGeomEps;
}

Feasibility is_feasible(const BinState& state, const Item& item, const Vec3& at) {
    const Container& c = state.container();
    const Box b{at.x, at.y, at.z, item.w, item.d, item.h};
    if (at.x < -kGeomEps || at.y < -kGeomEps || at.z < -kGeomEps ||
        b.x2() > c.sx + kGeomEps || b.y2() > c.sy + kGeomEps || b.z2() > c.sz + kGeomEps)
        return {false, Violation::Containment};
    for (const PlacedItem& p : state.packed())
        if (b.overlaps(p.box())) return {false, Violation::Overlap};
    if (!stable(state, item, at)) return {false, Violation::Stability};
    return {true, Violation::None};
}

BinState apply_placement(const BinState& state, const Item& item, const Vec3& at) {
    const Feasibility f = is_feasible(state, item, at);
    if (!f.ok)
        throw Error("infeasible_placement",
                    std::string("apply_placement: ") + violation_name(f.reason) + " violated");
    BinState next = state;
    next.place(item, at);
    return next;
}

} // namespace rpack
