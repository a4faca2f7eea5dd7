#pragma once

#include "rpack/attacker.hpp"
#include "rpack/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rpack {

/// Generation settings for one dataset. Discrete: integer item sides in
/// {1..5} inside a 10^3 container. Continuous: x/y sides uniform on
/// (0.1, 0.5), z from {0.1, ..., 0.5}, unit container.
struct InstanceSpec {
    Mode mode = Mode::Discrete;
    double sx = 10, sy = 10, sz = 10;
    int item_count = 150;
    int instance_count = 200;
    uint64_t master_seed = 0;
    double tau = 0.3;

    Container container() const { return Container{sx, sy, sz, mode, tau}; }
    void validate() const;
};

InstanceSpec default_spec(Mode mode, uint64_t master_seed, int instances = 200, int items = 150);

struct Instance {
    uint64_t seed = 0;
    std::vector<Item> items;
    bool attacked = false;
    std::vector<int> attack_trace; // move-to-front actions that produced the order
};

struct Dataset {
    InstanceSpec spec;
    std::vector<Instance> instances;
};

// Deterministic generation: instance i draws from splitmix64 seeded with
// sub_seed(master_seed, i). Continuous sides are quantized to 9 decimal
// digits at generation time so serialization is exact.
Dataset generate(const InstanceSpec& spec);

// Replaces beta percent of the instances (seeded selection) by the item
// order realized when `attacker` plays against its victim with the given
// observable window; records the action trace. The item multiset of each
// attacked instance is unchanged.
void apply_mixture(Dataset& dataset, double beta, const Attacker& attacker, int window);

// Full realized ordering of an attacked episode: packed order, then the
// final queue, then the unseen stream tail.
std::vector<Item> realized_order(const std::vector<Item>& stream, int window,
                                 const std::vector<int>& actions, size_t packed_count);

// One JSON object per line; first line is a header pinning the format and
// RNG version. Continuous dimensions are serialized as 9-digit decimal
// strings, so serialize -> parse -> serialize is byte-identical.
std::string to_jsonl(const Dataset& dataset);
Dataset from_jsonl(const std::string& text);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace rpack
