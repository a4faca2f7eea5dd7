#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rpack/harness.hpp"
#include "rpack/instances.hpp"

#include <cmath>
#include <set>

using namespace rpack;

namespace {

std::multiset<std::array<double, 3>> dims_multiset(const std::vector<Item>& items) {
    std::multiset<std::array<double, 3>> out;
    for (const Item& it : items) out.insert({it.w, it.d, it.h});
    return out;
}

} // namespace

TEST_CASE("generation is deterministic and round-trips byte-identically") {
    const InstanceSpec spec = default_spec(Mode::Discrete, 12345, 20, 30);
    const Dataset a = generate(spec);
    const Dataset b = generate(spec);
    const std::string text = to_jsonl(a);
    CHECK(text == to_jsonl(b));

    const Dataset parsed = from_jsonl(text);
    CHECK(to_jsonl(parsed) == text);
    CHECK(parsed.instances.size() == 20);
    CHECK(parsed.spec.master_seed == 12345);
}

TEST_CASE("continuous datasets serialize exactly") {
    const InstanceSpec spec = default_spec(Mode::Continuous, 777, 10, 25);
    const Dataset ds = generate(spec);
    const std::string text = to_jsonl(ds);
    const Dataset parsed = from_jsonl(text);
    CHECK(to_jsonl(parsed) == text);
    for (size_t i = 0; i < ds.instances.size(); ++i)
        for (size_t j = 0; j < ds.instances[i].items.size(); ++j) {
            CHECK(parsed.instances[i].items[j].w == ds.instances[i].items[j].w);
            CHECK(parsed.instances[i].items[j].h == ds.instances[i].items[j].h);
        }
}

TEST_CASE("discrete sizes are uniform over one through five") {
    const InstanceSpec spec = default_spec(Mode::Discrete, 99, 1000, 150);
    const Dataset ds = generate(spec);
    int counts[3][5] = {};
    long total = 0;
    for (const Instance& inst : ds.instances)
        for (const Item& it : inst.items) {
            ++counts[0][static_cast<int>(it.w) - 1];
            ++counts[1][static_cast<int>(it.d) - 1];
            ++counts[2][static_cast<int>(it.h) - 1];
            ++total;
        }
    for (int d = 0; d < 3; ++d)
        for (int v = 0; v < 5; ++v) {
            const double freq = static_cast<double>(counts[d][v]) / total;
            CHECK(std::abs(freq - 0.2) <= 0.03);
        }
}

TEST_CASE("continuous sizes respect their supports") {
    const InstanceSpec spec = default_spec(Mode::Continuous, 4242, 50, 50);
    const Dataset ds = generate(spec);
    const std::set<double> zs{0.1, 0.2, 0.3, 0.4, 0.5};
    for (const Instance& inst : ds.instances)
        for (const Item& it : inst.items) {
            CHECK(it.w > 0.1 - 1e-9);
            CHECK(it.w < 0.5 + 1e-9);
            CHECK(it.d > 0.1 - 1e-9);
            CHECK(it.d < 0.5 + 1e-9);
            CHECK(zs.count(it.h) == 1);
        }
}

TEST_CASE("neighboring instances are serially uncorrelated") {
    const InstanceSpec spec = default_spec(Mode::Discrete, 5150, 400, 10);
    const Dataset ds = generate(spec);
    // Correlation between the first item volume of instance i and i+1.
    std::vector<double> v;
    for (const Instance& inst : ds.instances) v.push_back(inst.items[0].volume());
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    double num = 0, den = 0;
    for (size_t i = 0; i + 1 < v.size(); ++i) num += (v[i] - mean) * (v[i + 1] - mean);
    for (double x : v) den += (x - mean) * (x - mean);
    CHECK(std::abs(num / den) < 0.15);
}

TEST_CASE("mixture replaces the selected share and preserves multisets") {
    const InstanceSpec spec = default_spec(Mode::Discrete, 2024, 12, 12);
    Attacker atk;
    atk.kind = AttackerKind::Greedy;
    atk.victim = PackingPolicy{PolicyKind::Dbl};

    Dataset zero = generate(spec);
    const std::string before = to_jsonl(zero);
    apply_mixture(zero, 0, atk, 5);
    CHECK(to_jsonl(zero) == before);

    Dataset full = generate(spec);
    apply_mixture(full, 100, atk, 5);
    const Dataset original = generate(spec);
    for (size_t i = 0; i < full.instances.size(); ++i) {
        CHECK(full.instances[i].attacked);
        CHECK(dims_multiset(full.instances[i].items) ==
              dims_multiset(original.instances[i].items));
    }

    Dataset half = generate(spec);
    apply_mixture(half, 50, atk, 5);
    int attacked = 0;
    for (const Instance& inst : half.instances) attacked += inst.attacked ? 1 : 0;
    CHECK(attacked == 6);

    // Attacked instances replayed nominally match the live attack.
    const EvalReport materialized = evaluate(full, atk.victim, 5);
    const EvalReport live = evaluate(original, atk.victim, 5, &atk);
    REQUIRE(materialized.per_instance.size() == live.per_instance.size());
    for (size_t i = 0; i < live.per_instance.size(); ++i)
        CHECK(materialized.per_instance[i].utilization ==
              doctest::Approx(live.per_instance[i].utilization).epsilon(1e-12));
}

TEST_CASE("invalid specs are rejected") {
    InstanceSpec bad = default_spec(Mode::Discrete, 1, 10, 10);
    bad.sx = -1;
    CHECK_THROWS_AS(generate(bad), Error);
    InstanceSpec frac = default_spec(Mode::Discrete, 1, 10, 10);
    frac.sx = 9.5;
    CHECK_THROWS_AS(generate(frac), Error);
    InstanceSpec none = default_spec(Mode::Discrete, 1, 10, 10);
    none.item_count = 0;
    CHECK_THROWS_AS(generate(none), Error);
}
