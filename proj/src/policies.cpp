#include "rpack/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpack {

PolicyKind policy_from_name(const std::string& name) {
    if (name == "dbl") return PolicyKind::Dbl;
    if (name == "bmf") return PolicyKind::Bmf;
    if (name == "lsah") return PolicyKind::Lsah;
    if (name == "onlinebph") return PolicyKind::OnlineBph;
    if (name == "hmm") return PolicyKind::Hmm;
    if (name == "macs") return PolicyKind::Macs;
    throw Error("invalid_spec", "unknown policy: " + name);
}

const char* policy_name(PolicyKind k) {
    switch (k) {
    case PolicyKind::Dbl: return "dbl";
    case PolicyKind::Bmf: return "bmf";
    case PolicyKind::Lsah: return "lsah";
    case PolicyKind::OnlineBph: return "onlinebph";
    case PolicyKind::Hmm: return "hmm";
    case PolicyKind::Macs: return "macs";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNoFitPenalty = 1e18; // anchors whose owning space cannot hold the item

double face_contact_area(const Box& a, const Box& b) {
    const double oy = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
    const double oz = std::min(a.z2(), b.z2()) - std::max(a.z, b.z);
    const double ox = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
    double area = 0.0;
    if (std::abs(a.x2() - b.x) <= kGeomEps || std::abs(b.x2() - a.x) <= kGeomEps)
        area += std::max(0.0, oy) * std::max(0.0, oz);
    if (std::abs(a.y2() - b.y) <= kGeomEps || std::abs(b.y2() - a.y) <= kGeomEps)
        area += std::max(0.0, ox) * std::max(0.0, oz);
    if (std::abs(a.z2() - b.z) <= kGeomEps || std::abs(b.z2() - a.z) <= kGeomEps)
        area += std::max(0.0, ox) * std::max(0.0, oy);
    return area;
}

// Surface-area change of the packed union caused by the new box. The shared
// constant (current union surface) is dropped: argmin is unaffected.
double lsah_score(const BinState& state, const Box& nb) {
    double contact = 0.0;
    for (const PlacedItem& p : state.packed()) contact += face_contact_area(nb, p.box());
    const double surface = 2.0 * (nb.w * nb.d + nb.w * nb.h + nb.d * nb.h);
    return surface - 2.0 * contact;
}

double hmm_score_discrete(const BinState& state, const Box& nb, double void_weight) {
    const int x0 = static_cast<int>(std::lround(nb.x));
    const int x1 = static_cast<int>(std::lround(nb.x2()));
    const int y0 = static_cast<int>(std::lround(nb.y));
    const int y1 = static_cast<int>(std::lround(nb.y2()));
    double rise = 0.0, trapped = 0.0;
    for (int cx = x0; cx < x1; ++cx)
        for (int cy = y0; cy < y1; ++cy) {
            const double hm = state.cell_height(cx, cy);
            rise += std::max(0.0, nb.z2() - hm);
            trapped += std::max(0.0, nb.z - hm);
        }
    return rise + void_weight * trapped;
}

// Continuous mode: the heightmap is piecewise constant on the footprint cut
// by the overlapping boxes' edges; integrate exactly over that decomposition.
double hmm_score_continuous(const BinState& state, const Box& nb, double void_weight) {
    std::vector<double> xs{nb.x, nb.x2()}, ys{nb.y, nb.y2()};
    std::vector<Box> local;
    for (const PlacedItem& p : state.packed()) {
        const Box b = p.box();
        if (!nb.overlaps_xy(b)) continue;
        local.push_back(b);
        if (b.x > nb.x && b.x < nb.x2()) xs.push_back(b.x);
        if (b.x2() > nb.x && b.x2() < nb.x2()) xs.push_back(b.x2());
        if (b.y > nb.y && b.y < nb.y2()) ys.push_back(b.y);
        if (b.y2() > nb.y && b.y2() < nb.y2()) ys.push_back(b.y2());
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double rise = 0.0, trapped = 0.0;
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        for (size_t j = 0; j + 1 < ys.size(); ++j) {
            const double area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
            if (area <= kGeomEps) continue;
            const double mx = (xs[i] + xs[i + 1]) / 2, my = (ys[j] + ys[j + 1]) / 2;
            double hm = 0.0;
            for (const Box& b : local)
                if (mx > b.x && mx < b.x2() && my > b.y && my < b.y2())
                    hm = std::max(hm, b.z2());
            rise += area * std::max(0.0, nb.z2() - hm);
            trapped += area * std::max(0.0, nb.z - hm);
        }
    return rise + void_weight * trapped;
}

// Total volume of accessible empty maximal spaces after the placement, where
// accessible means open toward the loading direction (reaching the ceiling).
// Maximal spaces overlap, so the sum measures how much free space stays
// usable from many sides; fragmenting placements lose accessibility mass.
// Equivalent to ems_update on a copy followed by the filtered sum, but only
// the spaces the box cuts pay the dominance scan.
double accessible_space_after(const std::vector<Box>& spaces, const Box& placed,
                              double ceiling) {
    double total = 0.0;
    std::vector<Box> residuals;
    std::vector<const Box*> uncut;
    uncut.reserve(spaces.size());
    for (const Box& s : spaces) {
        if (!s.overlaps(placed)) {
            uncut.push_back(&s);
            if (s.z2() >= ceiling - kGeomEps) total += s.volume();
            continue;
        }
        auto residual = [&](double x, double y, double z, double w, double d, double h) {
            if (w > kGeomEps && d > kGeomEps && h > kGeomEps)
                residuals.push_back(Box{x, y, z, w, d, h});
        };
        residual(s.x, s.y, s.z, placed.x - s.x, s.d, s.h);
        residual(placed.x2(), s.y, s.z, s.x2() - placed.x2(), s.d, s.h);
        residual(s.x, s.y, s.z, s.w, placed.y - s.y, s.h);
        residual(s.x, placed.y2(), s.z, s.w, s.y2() - placed.y2(), s.h);
        residual(s.x, s.y, s.z, s.w, s.d, placed.z - s.z);
        residual(s.x, s.y, placed.z2(), s.w, s.d, s.z2() - placed.z2());
    }
    for (size_t i = 0; i < residuals.size(); ++i) {
        const Box& r = residuals[i];
        if (r.z2() < ceiling - kGeomEps) continue;
        bool dominated = false;
        for (const Box* u : uncut)
            if (u->contains(r)) {
                dominated = true;
                break;
            }
        for (size_t j = 0; j < residuals.size() && !dominated; ++j) {
            if (i == j) continue;
            if (residuals[j].contains(r) && !(r.contains(residuals[j]) && i < j))
                dominated = true;
        }
        if (!dominated) total += r.volume();
    }
    return total;
}

// Scalar encoding of the deep-bottom-left order of a space's minimum corner;
// exact for the integral coordinates of discrete mode.
double dbl_key(const Box& s) { return s.z * 1e6 + s.y * 1e3 + s.x; }

// Free column above the anchor footprint, minus the item: the continuous-mode
// stand-in for the owning-space margin where no space provenance exists.
double free_column_margin(const BinState& state, const Item& item, const Vec3& at) {
    const double column = item.w * item.d * (state.container().sz - at.z);
    return column - item.volume();
}

} // namespace

double policy_score(const PackingPolicy& policy, const BinState& state, const Item& item,
                    const Candidate& cand) {
    const Box nb{cand.at.x, cand.at.y, cand.at.z, item.w, item.d, item.h};
    switch (policy.kind) {
    case PolicyKind::Dbl:
        return 0.0; // candidate order already is deep-bottom-left
    case PolicyKind::Bmf:
        if (cand.space >= 0)
            return cand.fits_space ? cand.space_volume - item.volume()
                                   : kNoFitPenalty + cand.space_volume;
        return free_column_margin(state, item, cand.at);
    case PolicyKind::Lsah:
        return lsah_score(state, nb);
    case PolicyKind::OnlineBph:
        // First fitting space in deep-bottom-left order of space corners.
        // Intersection-point anchors carry no owning space, so the rule
        // degrades to the plain deep-bottom-left anchor order.
        if (cand.space >= 0)
            return cand.fits_space ? dbl_key(state.spaces()[cand.space])
                                   : kNoFitPenalty + dbl_key(state.spaces()[cand.space]);
        return 0.0;
    case PolicyKind::Hmm:
        return state.container().mode == Mode::Discrete
                   ? hmm_score_discrete(state, nb, policy.hmm_void_weight)
                   : hmm_score_continuous(state, nb, policy.hmm_void_weight);
    case PolicyKind::Macs:
        return -accessible_space_after(state.spaces(), nb, state.container().sz);
    }
    return kInf;
}

SelectResult select(const PackingPolicy& policy, const BinState& state, const Item& item,
                    const CandidateSet& candidates) {
    if (candidates.empty()) return {true, {}, -1};
    int best = 0;
    double best_score = policy_score(policy, state, item, candidates.anchors[0]);
    for (size_t i = 1; i < candidates.anchors.size(); ++i) {
        const double s = policy_score(policy, state, item, candidates.anchors[i]);
        if (s < best_score) {
            best_score = s;
            best = static_cast<int>(i);
        }
    }
    return {false, candidates.anchors[best].at, best};
}

EpisodeSim::EpisodeSim(const Container& c, const std::vector<Item>& items, int window_size)
    : state(c), stream(&items), pos(0), window(window_size) {
    while (pos < stream->size() && static_cast<int>(state.queue().size()) < window)
        state.queue().push_back((*stream)[pos++]);
    done = state.queue().empty();
}

bool EpisodeSim::step(const PackingPolicy& policy, EpisodeResult* out) {
    if (done || state.queue().empty()) {
        done = true;
        return false;
    }
    const Item front = state.queue().front();
    const CandidateSet cands = candidates_for(state, front);
    const SelectResult pick = select(policy, state, front, cands);
    if (pick.terminate) {
        done = true;
        return false;
    }
    state.place(front, pick.at); // removes the queue front
    if (out) out->trace.push_back(StepRecord{front, pick.at});
    if (pos < stream->size()) state.queue().push_back((*stream)[pos++]);
    if (state.queue().empty()) done = true;
    return true;
}

double rollout_utilization(const PackingPolicy& policy, EpisodeSim sim, int max_steps) {
    int steps = 0;
    while (!sim.done && (max_steps < 0 || steps < max_steps)) {
        if (!sim.step(policy)) break;
        ++steps;
    }
    return sim.state.utilization();
}

EpisodeResult run_episode(const PackingPolicy& policy, const Container& container,
                          const std::vector<Item>& stream, int window, const AttackFn* attack) {
    EpisodeSim sim(container, stream, window);
    EpisodeResult result;
    while (!sim.done) {
        if (attack && *attack) {
            const int idx = (*attack)(sim);
            auto& q = sim.state.queue();
            if (idx < 1 || idx > static_cast<int>(q.size()))
                throw Error("invalid_spec", "attack action index out of range");
            if (idx > 1) {
                const Item moved = q[idx - 1];
                q.erase(q.begin() + (idx - 1));
                q.insert(q.begin(), moved);
            }
            result.attack_actions.push_back(idx);
        }
        if (!sim.step(policy, &result)) break;
    }
    result.utilization = sim.state.utilization();
    result.packed_count = static_cast<int>(sim.state.packed().size());
    return result;
}

} // namespace rpack
