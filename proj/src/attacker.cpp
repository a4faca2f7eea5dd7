#include "rpack/attacker.hpp"

#include <algorithm>
#include <limits>

namespace rpack {

AttackerKind attacker_from_name(const std::string& name) {
    if (name == "exhaustive") return AttackerKind::Exhaustive;
    if (name == "greedy") return AttackerKind::Greedy;
    if (name == "beam") return AttackerKind::Beam;
    throw Error("invalid_spec", "unknown attacker: " + name);
}

const char* attacker_name(AttackerKind k) {
    switch (k) {
    case AttackerKind::Exhaustive: return "exhaustive";
    case AttackerKind::Greedy: return "greedy";
    case AttackerKind::Beam: return "beam";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Applies move-to-front action idx (1-based) and plays one victim step.
EpisodeSim after_action(const EpisodeSim& sim, int idx, const PackingPolicy& victim) {
    EpisodeSim next = sim;
    auto& q = next.state.queue();
    if (idx > 1) {
        const Item moved = q[idx - 1];
        q.erase(q.begin() + (idx - 1));
        q.insert(q.begin(), moved);
    }
    next.step(victim);
    return next;
}

// Actions whose moved item has the same dimensions produce behaviorally
// identical queues; keep only the lowest index of each.
std::vector<int> distinct_actions(const std::vector<Item>& queue) {
    std::vector<int> actions;
    for (size_t i = 0; i < queue.size(); ++i) {
        bool dup = false;
        for (size_t j = 0; j < i && !dup; ++j) dup = queue[i].same_dims(queue[j]);
        if (!dup) actions.push_back(static_cast<int>(i) + 1);
    }
    return actions;
}

double exhaustive_value(const Attacker& atk, const EpisodeSim& sim, int depth);

double exhaustive_branch(const Attacker& atk, const EpisodeSim& sim, int depth, int* best_action) {
    double best = kInf;
    for (int a : distinct_actions(sim.state.queue())) {
        const EpisodeSim child = after_action(sim, a, atk.victim);
        const double v = exhaustive_value(atk, child, depth + 1);
        if (v < best) {
            best = v;
            if (best_action) *best_action = a;
        }
    }
    return best;
}

double exhaustive_value(const Attacker& atk, const EpisodeSim& sim, int depth) {
    if (sim.done) return sim.state.utilization();
    if (atk.horizon >= 0 && depth >= atk.horizon)
        return rollout_utilization(atk.victim, sim, atk.rollout_depth_cap);
    return exhaustive_branch(atk, sim, depth, nullptr);
}

int greedy_step(const Attacker& atk, const EpisodeSim& sim) {
    double best = kInf;
    int best_action = 1;
    for (int a : distinct_actions(sim.state.queue())) {
        EpisodeSim child = after_action(sim, a, atk.victim);
        const double v = rollout_utilization(atk.victim, std::move(child), atk.rollout_depth_cap);
        if (v < best) {
            best = v;
            best_action = a;
        }
    }
    return best_action;
}

int beam_step(const Attacker& atk, const EpisodeSim& sim) {
    struct Node {
        EpisodeSim sim;
        int first_action;
        double value;
    };
    std::vector<Node> beam;
    for (int a : distinct_actions(sim.state.queue())) {
        EpisodeSim child = after_action(sim, a, atk.victim);
        const double v = rollout_utilization(atk.victim, child, atk.rollout_depth_cap);
        beam.push_back(Node{std::move(child), a, v});
    }
    auto shrink = [&](std::vector<Node>& nodes) {
        std::stable_sort(nodes.begin(), nodes.end(),
                         [](const Node& a, const Node& b) { return a.value < b.value; });
        if (static_cast<int>(nodes.size()) > atk.beam_width) nodes.resize(atk.beam_width);
    };
    shrink(beam);
    for (int step = 1; step < atk.beam_lookahead; ++step) {
        std::vector<Node> next;
        bool expanded = false;
        for (const Node& node : beam) {
            if (node.sim.done) {
                next.push_back(node);
                continue;
            }
            expanded = true;
            for (int a : distinct_actions(node.sim.state.queue())) {
                EpisodeSim child = after_action(node.sim, a, atk.victim);
                const double v =
                    rollout_utilization(atk.victim, child, atk.rollout_depth_cap);
                next.push_back(Node{std::move(child), node.first_action, v});
            }
        }
        if (!expanded) break;
        shrink(next);
        beam = std::move(next);
    }
    return beam.empty() ? 1 : beam.front().first_action;
}

} // namespace

int attack_step(const Attacker& attacker, const EpisodeSim& sim) {
    const auto& queue = sim.state.queue();
    if (queue.empty()) throw Error("invalid_spec", "attack_step on empty queue");
    if (queue.size() == 1) return 1;
    switch (attacker.kind) {
    case AttackerKind::Greedy: return greedy_step(attacker, sim);
    case AttackerKind::Beam: return beam_step(attacker, sim);
    case AttackerKind::Exhaustive: {
        if (static_cast<int>(queue.size()) > attacker.max_queue ||
            (sim.stream && static_cast<int>(sim.stream->size()) > attacker.max_items))
            throw Error("invalid_spec", "exhaustive attacker size caps exceeded");
        int best_action = 1;
        exhaustive_branch(attacker, sim, 0, &best_action);
        return best_action;
    }
    }
    return 1;
}

EpisodeResult attack_episode(const Attacker& attacker, const Container& container,
                             const std::vector<Item>& stream, int window) {
    const AttackFn fn = [&attacker](const EpisodeSim& sim) {
        return attack_step(attacker, sim);
    };
    return run_episode(attacker.victim, container, stream, window, &fn);
}

double fixed_order_utilization(const PackingPolicy& victim, const Container& container,
                               const std::vector<Item>& order, int window) {
    return run_episode(victim, container, order, window).utilization;
}

} // namespace rpack
