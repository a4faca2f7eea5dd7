#include "rpack/candidates.hpp"

#include <algorithm>
#include <cmath>

namespace rpack {

void ems_update(std::vector<Box>& spaces, const Box& placed) { subtract_box(spaces, placed); }

namespace {

// Planar line segment x = value (or y = value) spanning [lo, hi) in the other
// axis; walls span the whole container.
struct EdgeLine {
    double value;
    double lo, hi;
    bool is_wall;
};

bool near(double a, double b) { return std::abs(a - b) <= kGeomEps; }

// An x-edge extends along y from its own span until a footprint strictly
// crossing the line blocks it. `target` is the y of the intersection point.
bool reaches(const EdgeLine& e, double target, const std::vector<PlacedItem>& packed,
             bool x_axis, bool extend_through) {
    if (e.is_wall || extend_through) return true;
    if (target >= e.lo - kGeomEps && target <= e.hi + kGeomEps) return true;
    const double from = target < e.lo ? target : e.hi;
    const double to = target < e.lo ? e.lo : target;
    for (const PlacedItem& p : packed) {
        const Box b = p.box();
        const double cross_lo = x_axis ? b.x : b.y; // interval crossing the line
        const double cross_hi = x_axis ? b.x2() : b.y2();
        if (!(e.value > cross_lo + kGeomEps && e.value < cross_hi - kGeomEps)) continue;
        const double span_lo = x_axis ? b.y : b.x;
        const double span_hi = x_axis ? b.y2() : b.x2();
        if (span_hi > from + kGeomEps && span_lo < to - kGeomEps) return false;
    }
    return true;
}

void push_unique(std::vector<EdgeLine>& lines, EdgeLine e) {
    for (const EdgeLine& o : lines)
        if (near(o.value, e.value) && o.is_wall == e.is_wall && near(o.lo, e.lo) &&
            near(o.hi, e.hi))
            return;
    lines.push_back(e);
}

} // namespace

std::vector<Vec3> intersection_points(const BinState& state, const Item& item,
                                      bool extend_through_blockers) {
    const Container& c = state.container();
    if (state.packed().empty()) {
        if (item.w > c.sx + kGeomEps || item.d > c.sy + kGeomEps) return {};
        return {Vec3{0, 0, 0}};
    }
    std::vector<EdgeLine> xs, ys;
    push_unique(xs, {0.0, 0.0, c.sy, true});
    push_unique(ys, {0.0, 0.0, c.sx, true});
    if (c.sx - item.w > kGeomEps) push_unique(xs, {c.sx - item.w, 0.0, c.sy, true});
    if (c.sy - item.d > kGeomEps) push_unique(ys, {c.sy - item.d, 0.0, c.sx, true});
    for (const PlacedItem& p : state.packed()) {
        const Box b = p.box();
        push_unique(xs, {b.x, b.y, b.y2(), false});
        push_unique(xs, {b.x2(), b.y, b.y2(), false});
        push_unique(ys, {b.y, b.x, b.x2(), false});
        push_unique(ys, {b.y2(), b.x, b.x2(), false});
    }

    std::vector<Vec3> points;
    for (const EdgeLine& ex : xs) {
        if (ex.value < -kGeomEps || ex.value + item.w > c.sx + kGeomEps) continue;
        for (const EdgeLine& ey : ys) {
            if (ey.value < -kGeomEps || ey.value + item.d > c.sy + kGeomEps) continue;
            if (!reaches(ex, ey.value, state.packed(), true, extend_through_blockers)) continue;
            if (!reaches(ey, ex.value, state.packed(), false, extend_through_blockers)) continue;
            const double z = drop_z(state, item, ex.value, ey.value);
            Vec3 pt{ex.value, ey.value, z};
            bool dup = false;
            for (const Vec3& q : points)
                if (near(q.x, pt.x) && near(q.y, pt.y)) {
                    dup = true;
                    break;
                }
            if (!dup) points.push_back(pt);
        }
    }
    return points;
}

CandidateSet candidates_for(const BinState& state, const Item& item, int cap) {
    const Container& c = state.container();
    std::vector<Candidate> raw;
    if (c.mode == Mode::Discrete) {
        const auto& spaces = state.spaces();
        raw.reserve(spaces.size() * 4);
        for (size_t i = 0; i < spaces.size(); ++i) {
            const Box& s = spaces[i];
            const bool fits = item.w <= s.w + kGeomEps && item.d <= s.d + kGeomEps &&
                              item.h <= s.h + kGeomEps;
            // Anchor at each bottom corner of the space, item snug against it.
            const double corner_x[2] = {s.x, s.x2() - item.w};
            const double corner_y[2] = {s.y, s.y2() - item.d};
            for (int cx = 0; cx < (fits ? 2 : 1); ++cx)
                for (int cy = 0; cy < (fits ? 2 : 1); ++cy) {
                    const double x = corner_x[cx], y = corner_y[cy];
                    if (x < -kGeomEps || y < -kGeomEps || x + item.w > c.sx + kGeomEps ||
                        y + item.d > c.sy + kGeomEps)
                        continue;
                    const double z = drop_z(state, item, x, y);
                    raw.push_back(
                        Candidate{Vec3{x, y, z}, static_cast<int>(i), s.volume(), fits});
                }
        }
    } else {
        for (const Vec3& pt : intersection_points(state, item))
            raw.push_back(Candidate{pt, -1, 0.0, false});
    }

    std::stable_sort(raw.begin(), raw.end(), [](const Candidate& a, const Candidate& b) {
        if (a.at.z != b.at.z) return a.at.z < b.at.z;
        if (a.at.y != b.at.y) return a.at.y < b.at.y;
        if (a.at.x != b.at.x) return a.at.x < b.at.x;
        return a.space < b.space;
    });

    CandidateSet out;
    for (const Candidate& cand : raw) {
        bool dup = false;
        for (const Candidate& kept : out.anchors)
            if (std::abs(kept.at.x - cand.at.x) <= kGeomEps &&
                std::abs(kept.at.y - cand.at.y) <= kGeomEps &&
                std::abs(kept.at.z - cand.at.z) <= kGeomEps) {
                dup = true;
                break;
            }
        if (dup) continue;
        if (!is_feasible(state, item, cand.at)) continue;
        out.anchors.push_back(cand);
        if (static_cast<int>(out.anchors.size()) >= cap) break;
    }
    return out;
}

} // namespace rpack
