#include "rpack/harness.hpp"
#include "rpack/mdp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace rpack;
using ordered_json = nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    uint64_t seed = 0;
    int threads = 0;
    std::string mode = "discrete";
    int nb = 1;
    double alpha = 1.0;
    double rho = 0.1;
    double rho_w = 0.1;
    double beta = 0.0;
    std::string policy = "dbl";
    std::string attacker;
    double tau = 0.3;
    int instances = 200;
    int items = 150;
};

// Config file keys mirror the long flags; explicit flags win.
void load_config(const std::string& path, GlobalOpts& g) {
    std::ifstream in(path);
    if (!in) throw Error("invalid_spec", "cannot open config file: " + path);
    ordered_json j;
    in >> j;
    if (j.contains("seed")) g.seed = j["seed"].get<uint64_t>();
    if (j.contains("threads")) g.threads = j["threads"].get<int>();
    if (j.contains("mode")) g.mode = j["mode"].get<std::string>();
    if (j.contains("nb")) g.nb = j["nb"].get<int>();
    if (j.contains("alpha")) g.alpha = j["alpha"].get<double>();
    if (j.contains("rho")) g.rho = j["rho"].get<double>();
    if (j.contains("rho_w")) g.rho_w = j["rho_w"].get<double>();
    if (j.contains("beta")) g.beta = j["beta"].get<double>();
    if (j.contains("policy")) g.policy = j["policy"].get<std::string>();
    if (j.contains("attacker")) g.attacker = j["attacker"].get<std::string>();
    if (j.contains("tau")) g.tau = j["tau"].get<double>();
    if (j.contains("instances")) g.instances = j["instances"].get<int>();
    if (j.contains("items")) g.items = j["items"].get<int>();
}

Mode parse_mode(const std::string& m) {
    if (m == "discrete") return Mode::Discrete;
    if (m == "continuous") return Mode::Continuous;
    throw Error("invalid_spec", "unknown mode: " + m);
}

struct AttackerFlags {
    int horizon = -1;
    int beam_width = 4;
    int lookahead = 3;
    int rollout_cap = -1;
};

Attacker make_attacker(const GlobalOpts& g, const std::string& kind, const AttackerFlags& f) {
    Attacker a;
    a.kind = attacker_from_name(kind);
    a.victim = PackingPolicy{policy_from_name(g.policy)};
    a.horizon = f.horizon;
    a.beam_width = f.beam_width;
    a.beam_lookahead = f.lookahead;
    a.rollout_depth_cap = f.rollout_cap;
    return a;
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("invalid_spec", "cannot open for writing: " + path);
    out << bytes;
}

// Nominal and attacked traces share one schema.
std::string trace_jsonl(const Dataset& ds, const PackingPolicy& policy, int window,
                        const Attacker* attacker) {
    std::ostringstream out;
    const Container box = ds.spec.container();
    for (size_t i = 0; i < ds.instances.size(); ++i) {
        const EpisodeResult res =
            attacker ? attack_episode(*attacker, box, ds.instances[i].items, window)
                     : run_episode(policy, box, ds.instances[i].items, window);
        ordered_json line;
        line["index"] = i;
        line["utilization"] = res.utilization;
        line["count"] = res.packed_count;
        ordered_json placements = ordered_json::array();
        for (const StepRecord& r : res.trace) {
            ordered_json p;
            p["item"] = {r.item.w, r.item.d, r.item.h};
            p["at"] = {r.at.x, r.at.y, r.at.z};
            placements.push_back(std::move(p));
        }
        line["placements"] = std::move(placements);
        line["attack_actions"] = res.attack_actions;
        out << line.dump() << '\n';
    }
    return out.str();
}

ordered_json mdp_contraction(uint64_t seed, int trials) {
    SplitMix64 rng(seed);
    ordered_json results = ordered_json::array();
    double worst_ratio = 0;
    for (int t = 0; t < trials; ++t) {
        const int ns = 2 + rng.next_int(0, 4), na = 1 + rng.next_int(0, 2);
        const double gamma = std::vector<double>{0.8, 0.9, 0.95}[rng.next_int(0, 2)];
        const FiniteMDP m = random_mdp(rng, ns, na, gamma);
        const Kernel pw = random_kernel(rng, ns, na);
        const PolicyMatrix pi = random_policy(rng, ns, na);
        const double alpha = rng.next_uniform(0.1, 1.0);
        const double rho_prime =
            alpha * model_discrepancy(m.P, pw, ns, na) + rng.next_uniform(0.0, 0.5);
        Value v1(ns), v2(ns);
        for (double& x : v1) x = rng.next_uniform(-2, 2);
        for (double& x : v2) x = rng.next_uniform(-2, 2);
        double dv = 0;
        for (int s = 0; s < ns; ++s) dv = std::max(dv, std::abs(v1[s] - v2[s]));
        ordered_json entry;
        entry["gamma"] = gamma;
        for (InnerForm form : {InnerForm::Direct, InnerForm::Dual}) {
            const Value t1 = adjustable_bellman(m, v1, pi, m.P, pw, alpha, rho_prime, form);
            const Value t2 = adjustable_bellman(m, v2, pi, m.P, pw, alpha, rho_prime, form);
            double dt = 0;
            for (int s = 0; s < ns; ++s) dt = std::max(dt, std::abs(t1[s] - t2[s]));
            const double ratio = dv > 0 ? dt / dv : 0.0;
            entry[form == InnerForm::Direct ? "ratio_direct" : "ratio_dual"] = ratio;
            worst_ratio = std::max(worst_ratio, ratio / gamma);
        }
        const FixedPointResult fp = fixed_point(m, pi, m.P, pw, alpha, rho_prime);
        entry["iterations"] = fp.iterations;
        results.push_back(std::move(entry));
    }
    ordered_json out;
    out["suite"] = "contraction";
    out["trials"] = trials;
    out["worst_ratio_over_gamma"] = worst_ratio;
    out["pass"] = worst_ratio <= 1.0 + 1e-9;
    out["results"] = std::move(results);
    return out;
}

ordered_json mdp_duality(uint64_t seed, int trials) {
    SplitMix64 rng(seed);
    double worst_gap = 0;
    ordered_json results = ordered_json::array();
    for (int t = 0; t < trials; ++t) {
        const int n = 2 + rng.next_int(0, 6);
        std::vector<double> v(n), p0(n), pw(n);
        double s0 = 0, sw = 0;
        for (int i = 0; i < n; ++i) {
            v[i] = rng.next_uniform(-2, 2);
            p0[i] = 0.05 + rng.next_double();
            pw[i] = 0.05 + rng.next_double();
            s0 += p0[i];
            sw += pw[i];
        }
        for (double& x : p0) x /= s0;
        for (double& x : pw) x /= sw;
        const double alpha = rng.next_uniform(0.05, 1.0);
        const double rho_prime = alpha * tv_distance(p0, pw) + rng.next_uniform(0.0, 0.8);
        const double direct = inner_sup_direct(v, p0, pw, alpha, rho_prime).first;
        const double dual = inner_sup_dual(v, p0, pw, alpha, rho_prime / (1 + alpha)).first;
        worst_gap = std::max(worst_gap, std::abs(direct - dual));
        ordered_json entry;
        entry["direct"] = direct;
        entry["dual"] = dual;
        results.push_back(std::move(entry));
    }
    ordered_json out;
    out["suite"] = "duality";
    out["trials"] = trials;
    out["worst_gap"] = worst_gap;
    out["pass"] = worst_gap <= 1e-6;
    out["results"] = std::move(results);
    return out;
}

ordered_json mdp_bound(uint64_t seed, int trials) {
    SplitMix64 rng(seed);
    int holds = 0;
    ordered_json results = ordered_json::array();
    for (int t = 0; t < trials; ++t) {
        const int ns = 2 + rng.next_int(0, 3), na = 1 + rng.next_int(0, 2);
        const FiniteMDP m = random_mdp(rng, ns, na, 0.9);
        const PolicyMatrix pi = random_policy(rng, ns, na);
        const Kernel pw = random_kernel(rng, ns, na);
        const Kernel pm = random_kernel(rng, ns, na);
        const double alpha = rng.next_uniform(0.05, 1.0);
        const BoundCheck b = return_bound_check(m, pi, m.P, pw, pm, alpha);
        holds += b.holds ? 1 : 0;
        ordered_json entry;
        entry["lhs"] = b.lhs;
        entry["rhs"] = b.rhs;
        entry["holds"] = b.holds;
        results.push_back(std::move(entry));
    }
    ordered_json out;
    out["suite"] = "bound";
    out["trials"] = trials;
    out["holds"] = holds;
    out["pass"] = holds == trials;
    out["results"] = std::move(results);
    return out;
}

ordered_json mdp_solver(uint64_t seed, int trials, double alpha, double rho, double rho_w) {
    SplitMix64 rng(seed);
    ordered_json results = ordered_json::array();
    int converged = 0;
    for (int t = 0; t < trials; ++t) {
        const FiniteMDP m = random_mdp(rng, 2 + rng.next_int(0, 2), 2, 0.9);
        RobustConfig cfg;
        cfg.alpha = alpha;
        cfg.rho = rho;
        cfg.rho_w = rho_w;
        const RobustSolveResult res = adjustable_policy_iteration(m, cfg);
        const PolicyMatrix pim = deterministic_policy(res.policy, m.na);
        const double objective = policy_return(m, pim, m.P) +
                                 cfg.alpha * policy_return(m, pim, res.worst);
        ordered_json entry;
        entry["policy"] = res.policy;
        entry["objective"] = objective;
        entry["iterations"] = res.iterations;
        entry["cycle"] = res.cycle_detected;
        results.push_back(std::move(entry));
        converged += res.cycle_detected ? 0 : 1;
    }
    ordered_json out;
    out["suite"] = "solver";
    out["trials"] = trials;
    out["converged"] = converged;
    out["results"] = std::move(results);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") {
            try {
                load_config(argv[i + 1], g);
            } catch (const Error& e) {
                std::cerr << ordered_json{{"error", {{"code", e.code}, {"message", e.what()}}}}
                                 .dump()
                          << "\n";
                return 1;
            }
        }

    CLI::App app{"online 3d bin packing lab: heuristic policies, permutation attackers, "
                 "robust-MDP verification"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with flag defaults");

    AttackerFlags af;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file with flag defaults");
        cmd->add_option("--seed", g.seed, "master seed");
        cmd->add_option("--threads", g.threads, "worker threads (0 = all cores)");
        cmd->add_option("--mode", g.mode, "discrete|continuous");
        cmd->add_option("--nb", g.nb, "observable window N_B");
        cmd->add_option("--alpha", g.alpha, "robustness weight in (0,1]");
        cmd->add_option("--rho", g.rho, "normalized mixture radius");
        cmd->add_option("--rho-w", g.rho_w, "worst-case set radius");
        cmd->add_option("--beta", g.beta, "percent of instances attacked");
        cmd->add_option("--policy", g.policy, "dbl|bmf|lsah|onlinebph|hmm|macs");
        cmd->add_option("--attacker", g.attacker, "greedy|beam|exhaustive");
        cmd->add_option("--tau", g.tau, "support-area stability threshold");
        cmd->add_option("--horizon", af.horizon, "exhaustive horizon (-1 = episode end)");
        cmd->add_option("--beam-width", af.beam_width, "beam width");
        cmd->add_option("--beam-lookahead", af.lookahead, "beam lookahead steps");
        cmd->add_option("--rollout-cap", af.rollout_cap, "rollout depth cap (-1 = none)");
    };

    auto* gen = app.add_subcommand("gen", "generate a dataset (optionally a beta-mixture)");
    add_common(gen);
    std::string gen_out = "-";
    gen->add_option("--instances", g.instances, "instances per dataset");
    gen->add_option("--items", g.items, "items per instance");
    gen->add_option("-o,--out", gen_out, "output path (- for stdout)");

    auto* pack = app.add_subcommand("pack", "run nominal episodes, emit traces");
    add_common(pack);
    std::string pack_data, pack_out = "-";
    pack->add_option("--data", pack_data, "dataset file")->required();
    pack->add_option("-o,--out", pack_out, "output path");

    auto* attack = app.add_subcommand("attack", "run attacked episodes, emit traces");
    add_common(attack);
    std::string attack_data, attack_out = "-";
    attack->add_option("--data", attack_data, "dataset file")->required();
    attack->add_option("-o,--out", attack_out, "output path");

    auto* eval = app.add_subcommand("eval", "evaluate a policy over a dataset");
    add_common(eval);
    std::string eval_data, eval_out = "-", eval_format = "csv";
    eval->add_option("--data", eval_data, "dataset file")->required();
    eval->add_option("--format", eval_format, "csv|json");
    eval->add_option("-o,--out", eval_out, "output path");

    auto* mdp = app.add_subcommand("mdp", "random robust-MDP property suites");
    add_common(mdp);
    std::string suite = "all", mdp_out = "-";
    int trials = 100;
    mdp->add_option("--suite", suite, "contraction|duality|bound|solver|all");
    mdp->add_option("--trials", trials, "trials per suite");
    mdp->add_option("-o,--out", mdp_out, "output path");

    auto* report = app.add_subcommand("report", "reformat a stored JSON report");
    std::string report_in, report_out = "-", report_format = "csv";
    report->add_option("--config", config_path, "JSON config file with flag defaults");
    report->add_option("--in", report_in, "JSON report file")->required();
    report->add_option("--format", report_format, "csv|json");
    report->add_option("-o,--out", report_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            InstanceSpec spec = default_spec(parse_mode(g.mode), g.seed, g.instances, g.items);
            spec.tau = g.tau;
            Dataset ds = generate(spec);
            if (g.beta > 0) {
                if (g.attacker.empty()) g.attacker = "greedy";
                apply_mixture(ds, g.beta, make_attacker(g, g.attacker, af), g.nb);
            }
            write_output(gen_out, to_jsonl(ds));
        } else if (*pack) {
            const Dataset ds = load_dataset(pack_data);
            check_mode(ds, parse_mode(g.mode));
            write_output(pack_out,
                         trace_jsonl(ds, PackingPolicy{policy_from_name(g.policy)}, g.nb,
                                     nullptr));
        } else if (*attack) {
            const Dataset ds = load_dataset(attack_data);
            check_mode(ds, parse_mode(g.mode));
            if (g.attacker.empty()) g.attacker = "greedy";
            const Attacker atk = make_attacker(g, g.attacker, af);
            write_output(attack_out, trace_jsonl(ds, atk.victim, g.nb, &atk));
        } else if (*eval) {
            const Dataset ds = load_dataset(eval_data);
            check_mode(ds, parse_mode(g.mode));
            std::optional<Attacker> atk;
            if (!g.attacker.empty()) atk = make_attacker(g, g.attacker, af);
            const EvalReport rep = evaluate(ds, PackingPolicy{policy_from_name(g.policy)},
                                            g.nb, atk ? &*atk : nullptr, g.threads);
            write_output(eval_out, eval_format == "json" ? report_json(rep) : report_csv(rep));
        } else if (*mdp) {
            ordered_json out = ordered_json::array();
            if (suite == "contraction" || suite == "all")
                out.push_back(mdp_contraction(g.seed, trials));
            if (suite == "duality" || suite == "all") out.push_back(mdp_duality(g.seed, trials));
            if (suite == "bound" || suite == "all") out.push_back(mdp_bound(g.seed, trials));
            if (suite == "solver" || suite == "all")
                out.push_back(mdp_solver(g.seed, std::min(trials, 20), g.alpha, g.rho, g.rho_w));
            write_output(mdp_out, out.dump(2) + "\n");
        } else if (*report) {
            std::ifstream in(report_in);
            if (!in) throw Error("invalid_spec", "cannot open report: " + report_in);
            std::ostringstream buf;
            buf << in.rdbuf();
            const EvalReport rep = report_from_json(buf.str());
            write_output(report_out,
                         report_format == "json" ? report_json(rep) : report_csv(rep));
        }
    } catch (const Error& e) {
        std::cerr << ordered_json{{"error", {{"code", e.code}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << ordered_json{{"error", {{"code", "internal"}, {"message", e.what()}}}}
                         .dump()
                  << "\n";
        return 1;
    }
    return 0;
}
