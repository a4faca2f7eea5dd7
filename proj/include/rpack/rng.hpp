#pragma once

#include <cstdint>

namespace rpack {

// SplitMix64 stream generator (Steele, Lea, Flood 2014). Chosen because its
// output is fully specified by the reference mixing constants, so identical
// seeds produce identical streams on every platform and compiler. The dataset
// file header pins this generator as "splitmix64-v1".
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi] via the 53-bit double path. The mapping has
    // a bias below 2^-50 for the range sizes used here, which is irrelevant
    // next to determinism.
    int next_int(int lo, int hi) {
        return lo + static_cast<int>(next_double() * static_cast<double>(hi - lo + 1));
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    uint64_t state_;
};

// Independent per-instance sub-seed derived from a master seed. Runs the
// master through one extra mix round so that consecutive indices land in
// unrelated parts of the stream space.
inline uint64_t sub_seed(uint64_t master, uint64_t index) {
    SplitMix64 g(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return g.next_u64();
}

} // namespace rpack
