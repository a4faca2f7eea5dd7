#pragma once

#include "rpack/candidates.hpp"
#include "rpack/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rpack {

enum class PolicyKind { Dbl, Bmf, Lsah, OnlineBph, Hmm, Macs };

PolicyKind policy_from_name(const std::string& name);
const char* policy_name(PolicyKind k);

/// Deterministic heuristic packing policy. Scores are reconstructions of the
/// one-line descriptions in the source heuristics:
///  Dbl       lexicographic (z, y, x) minimum
///  Bmf       smallest residual volume of the owning empty space
///  Lsah      smallest exposed surface area of the packed union
///  OnlineBph first fitting empty space in deep-bottom-left order
///  Hmm       smallest heightmap increase plus volume trapped under the item
///  Macs      largest total volume of empty maximal spaces still open
///            toward the loading direction
struct PackingPolicy {
    PolicyKind kind = PolicyKind::Dbl;
    double hmm_void_weight = 1.0; // weight of the trapped-void term
};

struct SelectResult {
    bool terminate = false;
    Vec3 at;
    int candidate_index = -1;
};

// Score of one candidate under the policy; lower is better. Exposed for the
// per-policy oracle tests.
double policy_score(const PackingPolicy& policy, const BinState& state, const Item& item,
                    const Candidate& cand);

// Argmin of the policy score; ties fall back to the candidate order, which is
// (z, y, x, provenance). Terminates iff candidates are empty.
SelectResult select(const PackingPolicy& policy, const BinState& state, const Item& item,
                    const CandidateSet& candidates);

struct StepRecord {
    Item item;
    Vec3 at;
};

struct EpisodeResult {
    double utilization = 0;
    int packed_count = 0;
    std::vector<StepRecord> trace;
    std::vector<int> attack_actions; // 1-based move-to-front indices, empty if nominal
};

/// Stepping form of an episode so attackers can snapshot and roll out.
/// The observable queue lives in the BinState; `pos` is the next stream item.
struct EpisodeSim {
    BinState state;
    const std::vector<Item>* stream = nullptr;
    size_t pos = 0;
    int window = 1;
    bool done = false;

    EpisodeSim() = default;
    EpisodeSim(const Container& c, const std::vector<Item>& items, int window_size);

    // Packs the queue front; returns false and sets done when no feasible
    // candidate exists. Refills the queue from the stream afterwards.
    bool step(const PackingPolicy& policy, EpisodeResult* out = nullptr);
};

// Final utilization of playing the simulation to the end (or `max_steps`
// further placements) with no attacker.
double rollout_utilization(const PackingPolicy& policy, EpisodeSim sim, int max_steps = -1);

// Reorders the observable queue before every placement; returns the 1-based
// index of the queue item moved to the front.
using AttackFn = std::function<int(const EpisodeSim&)>;

// Plays one nominal episode: repeatedly pack the front item until no feasible
// placement remains. Utilization is packed volume over container volume
// (the undiscounted terminal reward; intermediate rewards are zero).
EpisodeResult run_episode(const PackingPolicy& policy, const Container& container,
                          const std::vector<Item>& stream, int window,
                          const AttackFn* attack = nullptr);

} // namespace rpack
