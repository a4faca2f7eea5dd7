#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rpack/candidates.hpp"
#include "rpack/rng.hpp"

#include <set>

using namespace rpack;

namespace {

Container cube(double s, Mode m = Mode::Discrete) { return Container{s, s, s, m, 0.6}; }

// EMS-corner anchors recomputed from the brute-force maximal-box oracle:
// the minimum corner always, the other bottom corners when the item fits the
// space, mirroring the production anchor rule.
std::set<std::array<double, 3>> oracle_candidates(const BinState& state, const Item& item) {
    std::set<std::array<double, 3>> out;
    for (const oracle::GridBox& g : oracle::maximal_empty_boxes(state)) {
        const bool fits = item.w <= g.x1 - g.x0 && item.d <= g.y1 - g.y0 &&
                          item.h <= g.z1 - g.z0;
        const double cxs[2] = {static_cast<double>(g.x0), g.x1 - item.w};
        const double cys[2] = {static_cast<double>(g.y0), g.y1 - item.d};
        for (int i = 0; i < (fits ? 2 : 1); ++i)
            for (int j = 0; j < (fits ? 2 : 1); ++j) {
                const double x = cxs[i], y = cys[j];
                if (x < 0 || y < 0 || x + item.w > state.container().sx ||
                    y + item.d > state.container().sy)
                    continue;
                const double z = drop_z(state, item, x, y);
                if (is_feasible(state, item, {x, y, z})) out.insert({x, y, z});
            }
    }
    return out;
}

std::set<std::array<double, 3>> as_set(const CandidateSet& c) {
    std::set<std::array<double, 3>> out;
    for (const Candidate& a : c.anchors) out.insert({a.at.x, a.at.y, a.at.z});
    return out;
}

} // namespace

TEST_CASE("maximal spaces: empty container and first split") {
    BinState s(cube(2));
    REQUIRE(s.spaces().size() == 1);
    CHECK(s.spaces()[0] == Box{0, 0, 0, 2, 2, 2});

    s = apply_placement(s, Item{1, 1, 1, 0}, {0, 0, 0});
    CHECK(oracle::spaces_as_gridboxes(s) == oracle::maximal_empty_boxes(s));
    CHECK(s.spaces().size() == 3);
}

TEST_CASE("placing a disjoint box leaves far spaces unchanged") {
    BinState s(cube(6));
    s = apply_placement(s, Item{1, 1, 1, 0}, {0, 0, 0});
    const Box far{5, 5, 0, 1, 1, 6};
    std::vector<Box> spaces = s.spaces();
    const size_t before = spaces.size();
    ems_update(spaces, Box{0, 0, 1, 1, 1, 1}); // stack on the first box
    bool kept = false;
    for (const Box& b : spaces)
        if (b.x == 5 || b.x2() == 6) kept = true;
    CHECK(kept);
    CHECK(spaces.size() >= before - 1);
}

TEST_CASE("maximal spaces match the brute-force enumeration along episodes") {
    SplitMix64 rng(11);
    for (int episode = 0; episode < 10; ++episode) {
        BinState s(cube(6));
        for (int step = 0; step < 12; ++step) {
            const Item it{static_cast<double>(rng.next_int(1, 3)),
                          static_cast<double>(rng.next_int(1, 3)),
                          static_cast<double>(rng.next_int(1, 3)),
                          static_cast<int>(s.packed().size())};
            const int x = rng.next_int(0, 6 - static_cast<int>(it.w));
            const int y = rng.next_int(0, 6 - static_cast<int>(it.d));
            const double z = drop_z(s, it, x, y);
            if (!is_feasible(s, it, {static_cast<double>(x), static_cast<double>(y), z}))
                continue;
            s = apply_placement(s, it, {static_cast<double>(x), static_cast<double>(y), z});
            CHECK(oracle::spaces_as_gridboxes(s) == oracle::maximal_empty_boxes(s));
        }
    }
}

TEST_CASE("intersection points: empty bin and single box") {
    BinState s(cube(1, Mode::Continuous));
    const Item it{0.2, 0.2, 0.2, 0};
    const auto empty_pts = intersection_points(s, it);
    REQUIRE(empty_pts.size() == 1);
    CHECK(empty_pts[0].x == 0.0);
    CHECK(empty_pts[0].y == 0.0);
    CHECK(empty_pts[0].z == 0.0);

    s = apply_placement(s, Item{0.4, 0.3, 0.2, 0}, {0, 0, 0});
    const auto pts = intersection_points(s, it);
    std::set<double> xs, ys;
    for (const Vec3& p : pts) {
        xs.insert(p.x);
        ys.insert(p.y);
        CHECK(p.x >= 0.0);
        CHECK(p.y >= 0.0);
        CHECK(p.x + it.w <= 1.0 + kGeomEps);
        CHECK(p.y + it.d <= 1.0 + kGeomEps);
    }
    CHECK(xs == std::set<double>{0.0, 0.4, 0.8});
    CHECK(ys == std::set<double>{0.0, 0.3, 0.8});
}

TEST_CASE("edge extension stops at blocking footprints") {
    // Two separated boxes: the left box's y-edge cannot cross the right box.
    BinState s(cube(1, Mode::Continuous));
    s = apply_placement(s, Item{0.2, 0.2, 0.1, 0}, {0.0, 0.0, 0});
    s = apply_placement(s, Item{0.2, 0.4, 0.3, 1}, {0.4, 0.0, 0});
    const Item probe{0.1, 0.1, 0.1, 2};
    const auto pts = intersection_points(s, probe);
    // y = 0.2 comes from box 0 and crosses box 1's footprint before reaching
    // its far edge x = 0.6: the pair (0.6, 0.2) must not appear.
    bool blocked_present = false;
    for (const Vec3& p : pts)
        if (std::abs(p.x - 0.6) < 1e-12 && std::abs(p.y - 0.2) < 1e-12) blocked_present = true;
    CHECK(!blocked_present);
    const auto all = intersection_points(s, probe, true);
    bool full_line_present = false;
    for (const Vec3& p : all)
        if (std::abs(p.x - 0.6) < 1e-12 && std::abs(p.y - 0.2) < 1e-12) full_line_present = true;
    CHECK(full_line_present);
}

TEST_CASE("candidates_for basics") {
    BinState s(cube(10));
    const CandidateSet c = candidates_for(s, Item{3, 3, 3, 0});
    REQUIRE(!c.empty());
    CHECK(c.anchors[0].at == Vec3{0, 0, 0}); // (z, y, x) order puts the origin first

    CHECK(candidates_for(s, Item{11, 1, 1, 0}).empty());
}

TEST_CASE("candidates equal the EMS-corner oracle on small grids") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        BinState s(cube(6));
        for (int k = 0; k < 2; ++k) {
            const Item it{static_cast<double>(rng.next_int(1, 3)),
                          static_cast<double>(rng.next_int(1, 3)),
                          static_cast<double>(rng.next_int(1, 3)), k};
            const int x = rng.next_int(0, 6 - static_cast<int>(it.w));
            const int y = rng.next_int(0, 6 - static_cast<int>(it.d));
            const double z = drop_z(s, it, x, y);
            if (is_feasible(s, it, {static_cast<double>(x), static_cast<double>(y), z}))
                s = apply_placement(s, it, {static_cast<double>(x), static_cast<double>(y), z});
        }
        const Item probe{static_cast<double>(rng.next_int(1, 3)),
                         static_cast<double>(rng.next_int(1, 3)),
                         static_cast<double>(rng.next_int(1, 3)), 99};
        CHECK(as_set(candidates_for(s, probe)) == oracle_candidates(s, probe));
    }
}

TEST_CASE("candidates are feasible, unique, ordered, deterministic") {
    SplitMix64 rng(31);
    BinState s(cube(10));
    for (int k = 0; k < 6; ++k) {
        const Item it{static_cast<double>(rng.next_int(1, 5)),
                      static_cast<double>(rng.next_int(1, 5)),
                      static_cast<double>(rng.next_int(1, 5)), k};
        const int x = rng.next_int(0, 10 - static_cast<int>(it.w));
        const int y = rng.next_int(0, 10 - static_cast<int>(it.d));
        const double z = drop_z(s, it, x, y);
        if (is_feasible(s, it, {static_cast<double>(x), static_cast<double>(y), z}))
            s = apply_placement(s, it, {static_cast<double>(x), static_cast<double>(y), z});
    }
    const Item probe{2, 2, 2, 99};
    const CandidateSet a = candidates_for(s, probe);
    const CandidateSet b = candidates_for(s, probe);
    REQUIRE(a.size() == b.size());
    std::set<std::array<double, 3>> seen;
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.anchors[i].at == b.anchors[i].at);
        CHECK(is_feasible(s, probe, a.anchors[i].at).ok);
        CHECK(seen.insert({a.anchors[i].at.x, a.anchors[i].at.y, a.anchors[i].at.z}).second);
        if (i > 0) {
            const Vec3& prev = a.anchors[i - 1].at;
            const Vec3& cur = a.anchors[i].at;
            CHECK(std::tie(prev.z, prev.y, prev.x) <= std::tie(cur.z, cur.y, cur.x));
        }
    }
}
