#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rpack/policies.hpp"
#include "rpack/rng.hpp"

using namespace rpack;

namespace {

Container cube(double s) { return Container{s, s, s, Mode::Discrete, 0.6}; }

BinState random_state(SplitMix64& rng, int side, int boxes, int max_dim) {
    BinState s(cube(side));
    for (int k = 0; k < boxes; ++k) {
        const Item it{static_cast<double>(rng.next_int(1, max_dim)),
                      static_cast<double>(rng.next_int(1, max_dim)),
                      static_cast<double>(rng.next_int(1, max_dim)), k};
        const int x = rng.next_int(0, side - static_cast<int>(it.w));
        const int y = rng.next_int(0, side - static_cast<int>(it.d));
        const double z = drop_z(s, it, x, y);
        if (is_feasible(s, it, {static_cast<double>(x), static_cast<double>(y), z}))
            s = apply_placement(s, it, {static_cast<double>(x), static_cast<double>(y), z});
    }
    return s;
}

std::vector<Item> items_of(const std::vector<std::array<double, 3>>& dims) {
    std::vector<Item> out;
    for (size_t i = 0; i < dims.size(); ++i)
        out.push_back(Item{dims[i][0], dims[i][1], dims[i][2], static_cast<int>(i)});
    return out;
}

} // namespace

TEST_CASE("dbl picks the lexicographic minimum") {
    BinState s(cube(10));
    const Item it{3, 3, 3, 0};
    const CandidateSet c = candidates_for(s, it);
    const SelectResult r = select(PackingPolicy{PolicyKind::Dbl}, s, it, c);
    CHECK(!r.terminate);
    CHECK(r.at == Vec3{0, 0, 0});

    CHECK(select(PackingPolicy{PolicyKind::Dbl}, s, it, CandidateSet{}).terminate);
}

TEST_CASE("hmm prefers placements with zero heightmap increase") {
    BinState s(cube(10));
    s = apply_placement(s, Item{3, 4, 5, 0}, {0, 0, 0});
    s = apply_placement(s, Item{4, 4, 1, 1}, {0, 0, 5}); // overhang over x in [3,4)
    const Item probe{1, 1, 1, 2};
    const CandidateSet c = candidates_for(s, probe);
    const PackingPolicy hmm{PolicyKind::Hmm};
    const SelectResult r = select(hmm, s, probe, c);
    REQUIRE(!r.terminate);
    CHECK(policy_score(hmm, s, probe, c.anchors[r.candidate_index]) == 0.0);
    CHECK(r.at.z == 0.0); // tucked under the overhang, no new skyline
}

TEST_CASE("hmm choice matches a from-scratch heightmap diff") {
    SplitMix64 rng(59);
    const PackingPolicy hmm{PolicyKind::Hmm};
    for (int trial = 0; trial < 15; ++trial) {
        const BinState s = random_state(rng, 6, 3, 3);
        const Item probe{static_cast<double>(rng.next_int(1, 3)),
                         static_cast<double>(rng.next_int(1, 3)),
                         static_cast<double>(rng.next_int(1, 3)), 99};
        const CandidateSet c = candidates_for(s, probe);
        if (c.empty()) continue;
        auto recompute = [&](const Candidate& cand) {
            // New skyline cell by cell, plus the air sealed under the item.
            double score = 0;
            for (int cx = 0; cx < 6; ++cx)
                for (int cy = 0; cy < 6; ++cy) {
                    const bool inside = cx >= cand.at.x && cx < cand.at.x + probe.w &&
                                        cy >= cand.at.y && cy < cand.at.y + probe.d;
                    if (!inside) continue;
                    const double old_h = s.cell_height(cx, cy);
                    const double new_h = std::max(old_h, cand.at.z + probe.h);
                    score += new_h - old_h;
                    if (cand.at.z > old_h) score += cand.at.z - old_h;
                }
            return score;
        };
        const SelectResult r = select(hmm, s, probe, c);
        double best = 1e300;
        for (const Candidate& cand : c.anchors) best = std::min(best, recompute(cand));
        CHECK(recompute(c.anchors[r.candidate_index]) == doctest::Approx(best));
    }
}

TEST_CASE("lsah choice matches the voxel surface oracle") {
    SplitMix64 rng(61);
    const PackingPolicy lsah{PolicyKind::Lsah};
    for (int trial = 0; trial < 15; ++trial) {
        const BinState s = random_state(rng, 6, 3, 3);
        const Item probe{static_cast<double>(rng.next_int(1, 3)),
                         static_cast<double>(rng.next_int(1, 3)),
                         static_cast<double>(rng.next_int(1, 3)), 99};
        const CandidateSet c = candidates_for(s, probe);
        if (c.empty()) continue;
        const SelectResult r = select(lsah, s, probe, c);
        double best = 1e300;
        for (const Candidate& cand : c.anchors) {
            std::vector<Box> boxes;
            for (const PlacedItem& p : s.packed()) boxes.push_back(p.box());
            boxes.push_back(Box{cand.at.x, cand.at.y, cand.at.z, probe.w, probe.d, probe.h});
            best = std::min(best, oracle::union_surface_voxel(boxes, 6, 6, 6));
        }
        std::vector<Box> chosen;
        for (const PlacedItem& p : s.packed()) chosen.push_back(p.box());
        chosen.push_back(Box{r.at.x, r.at.y, r.at.z, probe.w, probe.d, probe.h});
        CHECK(oracle::union_surface_voxel(chosen, 6, 6, 6) == doctest::Approx(best));
    }
}

TEST_CASE("bmf minimizes the owning-space residual") {
    SplitMix64 rng(67);
    const PackingPolicy bmf{PolicyKind::Bmf};
    for (int trial = 0; trial < 15; ++trial) {
        const BinState s = random_state(rng, 6, 3, 3);
        const Item probe{2, 2, 2, 99};
        const CandidateSet c = candidates_for(s, probe);
        if (c.empty()) continue;
        const SelectResult r = select(bmf, s, probe, c);
        double best = 1e300;
        bool any_fit = false;
        for (const Candidate& cand : c.anchors)
            if (cand.fits_space) {
                best = std::min(best, cand.space_volume - probe.volume());
                any_fit = true;
            }
        if (!any_fit) continue;
        const Candidate& pick = c.anchors[r.candidate_index];
        CHECK(pick.fits_space);
        CHECK(pick.space_volume - probe.volume() == doctest::Approx(best));
    }
}

TEST_CASE("onlinebph takes the first fitting space in deep-bottom-left order") {
    SplitMix64 rng(71);
    const PackingPolicy obph{PolicyKind::OnlineBph};
    for (int trial = 0; trial < 15; ++trial) {
        const BinState s = random_state(rng, 6, 3, 3);
        const Item probe{2, 2, 2, 99};
        const CandidateSet c = candidates_for(s, probe);
        if (c.empty()) continue;
        const SelectResult r = select(obph, s, probe, c);
        auto corner_key = [&](const Candidate& cand) {
            const Box& sp = s.spaces()[cand.space];
            return std::array<double, 3>{sp.z, sp.y, sp.x};
        };
        std::array<double, 3> best{1e300, 1e300, 1e300};
        bool any_fit = false;
        for (const Candidate& cand : c.anchors)
            if (cand.fits_space) {
                best = std::min(best, corner_key(cand));
                any_fit = true;
            }
        if (!any_fit) continue;
        const Candidate& pick = c.anchors[r.candidate_index];
        CHECK(pick.fits_space);
        CHECK(corner_key(pick) == best);
    }
}

TEST_CASE("macs keeps the largest space achievable") {
    SplitMix64 rng(73);
    const PackingPolicy macs{PolicyKind::Macs};
    for (int trial = 0; trial < 15; ++trial) {
        const BinState s = random_state(rng, 6, 3, 3);
        const Item probe{2, 2, 2, 99};
        const CandidateSet c = candidates_for(s, probe);
        if (c.empty()) continue;
        const SelectResult r = select(macs, s, probe, c);
        // Recompute by full maximal-space maintenance per candidate; the
        // score is the total volume of spaces open to the ceiling.
        double best = -1e300;
        double chosen = 0;
        for (size_t i = 0; i < c.anchors.size(); ++i) {
            std::vector<Box> spaces = s.spaces();
            ems_update(spaces,
                       Box{c.anchors[i].at.x, c.anchors[i].at.y, c.anchors[i].at.z, probe.w,
                           probe.d, probe.h});
            double accessible = 0;
            for (const Box& b : spaces)
                if (b.z2() >= s.container().sz - kGeomEps) accessible += b.volume();
            best = std::max(best, accessible);
            if (static_cast<int>(i) == r.candidate_index) chosen = accessible;
        }
        CHECK(chosen == doctest::Approx(best));
    }
}

TEST_CASE("run_episode: perfect tiling, oversize item, trace accounting") {
    const std::vector<Item> eight(8, Item{5, 5, 5, 0});
    std::vector<Item> stream;
    for (int i = 0; i < 8; ++i) {
        stream.push_back(eight[i]);
        stream.back().id = i;
    }
    const EpisodeResult res = run_episode(PackingPolicy{PolicyKind::Dbl}, cube(10), stream, 1);
    CHECK(res.utilization == doctest::Approx(1.0));
    CHECK(res.packed_count == 8);

    const EpisodeResult none =
        run_episode(PackingPolicy{PolicyKind::Dbl}, cube(10), items_of({{11, 1, 1}}), 1);
    CHECK(none.utilization == 0.0);
    CHECK(none.packed_count == 0);

    double vol = 0;
    for (const StepRecord& r : res.trace) vol += r.item.volume();
    CHECK(res.utilization == doctest::Approx(vol / 1000.0));
}

TEST_CASE("episode traces replay feasibly and deterministically") {
    SplitMix64 rng(83);
    for (PolicyKind kind : {PolicyKind::Dbl, PolicyKind::Bmf, PolicyKind::Lsah,
                            PolicyKind::OnlineBph, PolicyKind::Hmm, PolicyKind::Macs}) {
        std::vector<Item> stream;
        for (int i = 0; i < 30; ++i)
            stream.push_back(Item{static_cast<double>(rng.next_int(1, 5)),
                                  static_cast<double>(rng.next_int(1, 5)),
                                  static_cast<double>(rng.next_int(1, 5)), i});
        const PackingPolicy policy{kind};
        const EpisodeResult a = run_episode(policy, cube(10), stream, 1);
        const EpisodeResult b = run_episode(policy, cube(10), stream, 1);
        REQUIRE(a.trace.size() == b.trace.size());
        for (size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].at == b.trace[i].at);

        // Replay verifier: every placement feasible at its step.
        BinState s(cube(10));
        double last_uti = 0;
        for (const StepRecord& r : a.trace) {
            REQUIRE(is_feasible(s, r.item, r.at).ok);
            s = apply_placement(s, r.item, r.at);
            CHECK(s.utilization() >= last_uti);
            last_uti = s.utilization();
        }
        CHECK(a.utilization == doctest::Approx(s.utilization()));
        CHECK(a.utilization >= 0.0);
        CHECK(a.utilization <= 1.0);
        CHECK(a.packed_count <= static_cast<int>(stream.size()));
    }
}

TEST_CASE("continuous-mode episodes pack and stay consistent") {
    SplitMix64 rng(91);
    std::vector<Item> stream;
    for (int i = 0; i < 25; ++i)
        stream.push_back(Item{0.1 + 0.4 * rng.next_double(), 0.1 + 0.4 * rng.next_double(),
                              0.1 * rng.next_int(1, 5), i});
    const Container c{1, 1, 1, Mode::Continuous, 0.6};
    for (PolicyKind kind :
         {PolicyKind::Dbl, PolicyKind::Bmf, PolicyKind::Lsah, PolicyKind::OnlineBph}) {
        const EpisodeResult res = run_episode(PackingPolicy{kind}, c, stream, 1);
        CHECK(res.packed_count > 0);
        BinState s(c);
        for (const StepRecord& r : res.trace) {
            REQUIRE(is_feasible(s, r.item, r.at).ok);
            s = apply_placement(s, r.item, r.at);
        }
        CHECK(oracle::check_invariants(s).empty());
    }
}
