#include "rpack/harness.hpp"

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rpack {

using ordered_json = nlohmann::ordered_json;

namespace {

InstanceOutcome run_one(const Dataset& ds, const Instance& inst, const PackingPolicy& policy,
                        int window, const Attacker* attacker) {
    const Container box = ds.spec.container();
    EpisodeResult res;
    if (attacker && !inst.attacked)
        res = attack_episode(*attacker, box, inst.items, window);
    else
        res = run_episode(policy, box, inst.items, window);
    return {res.utilization, res.packed_count};
}

void aggregate(EvalReport& rep) {
    const size_t n = rep.per_instance.size();
    if (n == 0) return;
    double sum = 0, count = 0;
    for (const InstanceOutcome& o : rep.per_instance) {
        sum += o.utilization;
        count += o.packed;
    }
    rep.uti = 100.0 * sum / n;
    rep.num = count / n;
    double var = 0;
    for (const InstanceOutcome& o : rep.per_instance) {
        const double d = 100.0 * o.utilization - rep.uti;
        var += d * d;
    }
    rep.stddev = std::sqrt(var / n);
}

EvalReport make_report(const Dataset& ds, const PackingPolicy& policy, int window,
                       const Attacker* attacker) {
    EvalReport rep;
    rep.policy = policy_name(policy.kind);
    rep.attacker = attacker ? attacker_name(attacker->kind) : "none";
    rep.window = window;
    rep.master_seed = ds.spec.master_seed;
    rep.mode = ds.spec.mode == Mode::Discrete ? "discrete" : "continuous";
    size_t attacked = 0;
    for (const Instance& i : ds.instances) attacked += i.attacked ? 1 : 0;
    rep.beta = ds.instances.empty() ? 0 : 100.0 * attacked / ds.instances.size();
    rep.per_instance.resize(ds.instances.size());
    return rep;
}

} // namespace

EvalReport evaluate(const Dataset& dataset, const PackingPolicy& policy, int window,
                    const Attacker* attacker, int threads) {
    EvalReport rep = make_report(dataset, policy, window, attacker);
    const int n = static_cast<int>(dataset.instances.size());
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int i = 0; i < n; ++i)
        rep.per_instance[i] = run_one(dataset, dataset.instances[i], policy, window, attacker);
#else
    (void)threads;
    for (int i = 0; i < n; ++i)
        rep.per_instance[i] = run_one(dataset, dataset.instances[i], policy, window, attacker);
#endif
    aggregate(rep);
    return rep;
}

EvalReport evaluate_serial(const Dataset& dataset, const PackingPolicy& policy, int window,
                           const Attacker* attacker) {
    EvalReport rep = make_report(dataset, policy, window, attacker);
    for (size_t i = 0; i < dataset.instances.size(); ++i)
        rep.per_instance[i] = run_one(dataset, dataset.instances[i], policy, window, attacker);
    aggregate(rep);
    return rep;
}

namespace {

std::string fixed6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

} // namespace

std::string report_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "policy,attacker,N_B,beta,uti,std,num\n";
    for (const InstanceOutcome& o : report.per_instance)
        out << report.policy << ',' << report.attacker << ',' << report.window << ','
            << fixed6(report.beta) << ',' << fixed6(100.0 * o.utilization) << ','
            << fixed6(report.stddev) << ',' << o.packed << '\n';
    return out.str();
}

std::string report_json(const EvalReport& report) {
    ordered_json j;
    j["policy"] = report.policy;
    j["attacker"] = report.attacker;
    j["N_B"] = report.window;
    j["beta"] = fixed6(report.beta);
    j["mode"] = report.mode;
    j["master_seed"] = report.master_seed;
    ordered_json agg;
    agg["uti"] = fixed6(report.uti);
    agg["std"] = fixed6(report.stddev);
    agg["num"] = fixed6(report.num);
    j["aggregates"] = std::move(agg);
    ordered_json inst = ordered_json::array();
    for (const InstanceOutcome& o : report.per_instance) {
        ordered_json e;
        e["utilization"] = fixed6(o.utilization);
        e["count"] = o.packed;
        inst.push_back(std::move(e));
    }
    j["instances"] = std::move(inst);
    return j.dump() + "\n";
}

EvalReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    EvalReport rep;
    rep.policy = j.at("policy").get<std::string>();
    rep.attacker = j.at("attacker").get<std::string>();
    rep.window = j.at("N_B").get<int>();
    rep.beta = std::strtod(j.at("beta").get<std::string>().c_str(), nullptr);
    rep.mode = j.at("mode").get<std::string>();
    rep.master_seed = j.at("master_seed").get<uint64_t>();
    for (const auto& e : j.at("instances")) {
        InstanceOutcome o;
        o.utilization = std::strtod(e.at("utilization").get<std::string>().c_str(), nullptr);
        o.packed = e.at("count").get<int>();
        rep.per_instance.push_back(o);
    }
    rep.uti = std::strtod(j.at("aggregates").at("uti").get<std::string>().c_str(), nullptr);
    rep.stddev = std::strtod(j.at("aggregates").at("std").get<std::string>().c_str(), nullptr);
    rep.num = std::strtod(j.at("aggregates").at("num").get<std::string>().c_str(), nullptr);
    return rep;
}

void check_mode(const Dataset& dataset, Mode expected) {
    if (dataset.spec.mode != expected)
        throw Error("mode_mismatch", "dataset mode does not match the requested mode");
}

} // namespace rpack
