#pragma once

#include "rpack/policies.hpp"

#include <string>
#include <vector>

namespace rpack {

enum class AttackerKind { Exhaustive, Greedy, Beam };

AttackerKind attacker_from_name(const std::string& name);
const char* attacker_name(AttackerKind k);

/// Search-based permutation attacker over the move-to-front action space.
/// The victim is used strictly as a black box: the attacker only runs it
/// forward, never inspects its scores.
///  Greedy      one rollout per action, pick the worst for the victim
///  Beam        keep the best `beam_width` action prefixes for
///              `beam_lookahead` steps, rollouts at the leaves
///  Exhaustive  full min-search over all reachable orderings to `horizon`
///              moves, rollout beyond; exponential, so guarded by size caps
struct Attacker {
    AttackerKind kind = AttackerKind::Greedy;
    PackingPolicy victim;
    int horizon = -1;        // exhaustive: -1 plays to the episode end
    int beam_width = 4;
    int beam_lookahead = 3;
    int rollout_depth_cap = -1; // greedy/beam rollout truncation, -1 = none

    // Exhaustive search guards.
    int max_queue = 6;
    int max_items = 10;
};

// Chooses the 1-based queue index to move to the front at the current step.
// Ties resolve to the lowest index.
int attack_step(const Attacker& attacker, const EpisodeSim& sim);

// Runs the victim episode with attack_step applied before every placement.
EpisodeResult attack_episode(const Attacker& attacker, const Container& container,
                             const std::vector<Item>& stream, int window);

// Utilization of the victim against a fixed full-sequence reordering.
double fixed_order_utilization(const PackingPolicy& victim, const Container& container,
                               const std::vector<Item>& order, int window);

} // namespace rpack
