#include "rpack/instances.hpp"

#include "rpack/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rpack {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatName = "rpack-dataset";
constexpr int kFormatVersion = 1;
constexpr const char* kRngName = "splitmix64-v1";

double quantize9(double x) { return std::round(x * 1e9) / 1e9; }

std::string decimal9(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    return buf;
}

Item draw_item(SplitMix64& rng, const InstanceSpec& spec, int id) {
    Item it;
    it.id = id;
    if (spec.mode == Mode::Discrete) {
        const int half = static_cast<int>(std::floor(spec.sx / 2));
        it.w = rng.next_int(1, half > 5 ? 5 : half);
        it.d = rng.next_int(1, half > 5 ? 5 : half);
        it.h = rng.next_int(1, half > 5 ? 5 : half);
    } else {
        it.w = quantize9(rng.next_uniform(0.1, 0.5));
        it.d = quantize9(rng.next_uniform(0.1, 0.5));
        it.h = quantize9(0.1 * rng.next_int(1, 5));
    }
    return it;
}

} // namespace

void InstanceSpec::validate() const {
    if (sx <= 0 || sy <= 0 || sz <= 0)
        throw Error("invalid_spec", "container extents must be positive");
    if (mode == Mode::Discrete &&
        (sx != std::floor(sx) || sy != std::floor(sy) || sz != std::floor(sz)))
        throw Error("invalid_spec", "discrete container extents must be integral");
    if (item_count <= 0 || instance_count <= 0)
        throw Error("invalid_spec", "item and instance counts must be positive");
    if (tau <= 0 || tau > 1) throw Error("invalid_spec", "tau must lie in (0,1]");
}

InstanceSpec default_spec(Mode mode, uint64_t master_seed, int instances, int items) {
    InstanceSpec s;
    s.mode = mode;
    if (mode == Mode::Continuous) s.sx = s.sy = s.sz = 1.0;
    s.master_seed = master_seed;
    s.instance_count = instances;
    s.item_count = items;
    return s;
}

Dataset generate(const InstanceSpec& spec) {
    spec.validate();
    Dataset ds;
    ds.spec = spec;
    ds.instances.resize(spec.instance_count);
    for (int i = 0; i < spec.instance_count; ++i) {
        Instance& inst = ds.instances[i];
        inst.seed = sub_seed(spec.master_seed, static_cast<uint64_t>(i));
        SplitMix64 rng(inst.seed);
        inst.items.reserve(spec.item_count);
        for (int j = 0; j < spec.item_count; ++j) inst.items.push_back(draw_item(rng, spec, j));
    }
    return ds;
}

std::vector<Item> realized_order(const std::vector<Item>& stream, int window,
                                 const std::vector<int>& actions, size_t packed_count) {
    std::vector<Item> queue, out;
    size_t pos = 0;
    while (pos < stream.size() && static_cast<int>(queue.size()) < window)
        queue.push_back(stream[pos++]);
    for (size_t t = 0; t < actions.size(); ++t) {
        const int idx = actions[t];
        if (idx > 1 && idx <= static_cast<int>(queue.size())) {
            const Item moved = queue[idx - 1];
            queue.erase(queue.begin() + (idx - 1));
            queue.insert(queue.begin(), moved);
        }
        if (t < packed_count) {
            out.push_back(queue.front());
            queue.erase(queue.begin());
            if (pos < stream.size()) queue.push_back(stream[pos++]);
        }
    }
    // Steps after the last recorded action keep the nominal order.
    while (out.size() < packed_count && !queue.empty()) {
        out.push_back(queue.front());
        queue.erase(queue.begin());
        if (pos < stream.size()) queue.push_back(stream[pos++]);
    }
    out.insert(out.end(), queue.begin(), queue.end());
    out.insert(out.end(), stream.begin() + pos, stream.end());
    return out;
}

void apply_mixture(Dataset& dataset, double beta, const Attacker& attacker, int window) {
    if (beta < 0 || beta > 100) throw Error("invalid_spec", "beta must lie in [0,100]");
    const int n = static_cast<int>(dataset.instances.size());
    const int k = static_cast<int>(std::llround(beta / 100.0 * n));
    if (k == 0) return;

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    SplitMix64 sel(sub_seed(dataset.spec.master_seed, 0xA77ACCULL));
    for (int i = n - 1; i > 0; --i) {
        const int j = sel.next_int(0, i);
        std::swap(order[i], order[j]);
    }
    order.resize(k);
    std::sort(order.begin(), order.end());

    const Container box = dataset.spec.container();
    for (int idx : order) {
        Instance& inst = dataset.instances[idx];
        const EpisodeResult res = attack_episode(attacker, box, inst.items, window);
        std::vector<Item> reordered =
            realized_order(inst.items, window, res.attack_actions, res.trace.size());
        if (reordered.size() != inst.items.size())
            throw Error("invalid_spec", "mixture: reordering changed the item count");
        for (size_t j = 0; j < reordered.size(); ++j) reordered[j].id = static_cast<int>(j);
        inst.items = std::move(reordered);
        inst.attacked = true;
        inst.attack_trace = res.attack_actions;
    }
}

namespace {

const char* mode_name(Mode m) { return m == Mode::Discrete ? "discrete" : "continuous"; }

Mode mode_from_name(const std::string& s) {
    if (s == "discrete") return Mode::Discrete;
    if (s == "continuous") return Mode::Continuous;
    throw Error("invalid_spec", "unknown mode: " + s);
}

ordered_json dims_json(const InstanceSpec& spec, const Item& it) {
    ordered_json a = ordered_json::array();
    if (spec.mode == Mode::Discrete) {
        a.push_back(static_cast<int>(it.w));
        a.push_back(static_cast<int>(it.d));
        a.push_back(static_cast<int>(it.h));
    } else {
        a.push_back(decimal9(it.w));
        a.push_back(decimal9(it.d));
        a.push_back(decimal9(it.h));
    }
    return a;
}

double dim_from_json(const ordered_json& v) {
    if (v.is_string()) return std::strtod(v.get<std::string>().c_str(), nullptr);
    return v.get<double>();
}

ordered_json container_json(const InstanceSpec& spec) {
    ordered_json a = ordered_json::array();
    if (spec.mode == Mode::Discrete) {
        a.push_back(static_cast<int>(spec.sx));
        a.push_back(static_cast<int>(spec.sy));
        a.push_back(static_cast<int>(spec.sz));
    } else {
        a.push_back(decimal9(spec.sx));
        a.push_back(decimal9(spec.sy));
        a.push_back(decimal9(spec.sz));
    }
    return a;
}

} // namespace

std::string to_jsonl(const Dataset& dataset) {
    std::ostringstream out;
    ordered_json header;
    header["format"] = kFormatName;
    header["version"] = kFormatVersion;
    header["rng"] = kRngName;
    header["mode"] = mode_name(dataset.spec.mode);
    header["container"] = container_json(dataset.spec);
    header["tau"] = decimal9(dataset.spec.tau);
    header["instances"] = static_cast<int>(dataset.instances.size());
    header["items_per_instance"] = dataset.spec.item_count;
    header["master_seed"] = dataset.spec.master_seed;
    out << header.dump() << '\n';

    for (const Instance& inst : dataset.instances) {
        ordered_json line;
        line["seed"] = inst.seed;
        line["mode"] = mode_name(dataset.spec.mode);
        line["container"] = container_json(dataset.spec);
        ordered_json items = ordered_json::array();
        for (const Item& it : inst.items) items.push_back(dims_json(dataset.spec, it));
        line["items"] = std::move(items);
        line["attacked"] = inst.attacked;
        line["attack_trace"] = inst.attack_trace;
        out << line.dump() << '\n';
    }
    return out.str();
}

Dataset from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("invalid_spec", "dataset file is empty");
    const ordered_json header = ordered_json::parse(line);
    if (header.value("format", "") != kFormatName)
        throw Error("invalid_spec", "not a dataset file");
    if (header.value("version", -1) != kFormatVersion)
        throw Error("invalid_spec", "unsupported dataset version");
    if (header.value("rng", "") != kRngName)
        throw Error("invalid_spec", "dataset written with an unknown rng");

    Dataset ds;
    ds.spec.mode = mode_from_name(header.at("mode").get<std::string>());
    ds.spec.sx = dim_from_json(header.at("container")[0]);
    ds.spec.sy = dim_from_json(header.at("container")[1]);
    ds.spec.sz = dim_from_json(header.at("container")[2]);
    ds.spec.tau = dim_from_json(header.at("tau"));
    ds.spec.item_count = header.at("items_per_instance").get<int>();
    ds.spec.instance_count = header.at("instances").get<int>();
    ds.spec.master_seed = header.at("master_seed").get<uint64_t>();

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json j = ordered_json::parse(line);
        Instance inst;
        inst.seed = j.at("seed").get<uint64_t>();
        int id = 0;
        for (const auto& dims : j.at("items")) {
            Item it;
            it.w = dim_from_json(dims[0]);
            it.d = dim_from_json(dims[1]);
            it.h = dim_from_json(dims[2]);
            it.id = id++;
            inst.items.push_back(it);
        }
        inst.attacked = j.at("attacked").get<bool>();
        if (j.contains("attack_trace"))
            inst.attack_trace = j.at("attack_trace").get<std::vector<int>>();
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("invalid_spec", "cannot open for writing: " + path);
    out << to_jsonl(dataset);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("invalid_spec", "cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

} // namespace rpack
