#pragma once

#include "rpack/attacker.hpp"
#include "rpack/instances.hpp"
#include "rpack/policies.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rpack {

struct InstanceOutcome {
    double utilization = 0;
    int packed = 0;
};

/// Per-instance outcomes plus Uti./Std./Num. aggregates. Uti is the mean
/// utilization in percent, Std the population standard deviation of the same
/// list, Num the mean packed count.
struct EvalReport {
    std::string policy;
    std::string attacker = "none";
    int window = 1;
    double beta = 0;
    uint64_t master_seed = 0;
    std::string mode;
    std::vector<InstanceOutcome> per_instance;
    double uti = 0, stddev = 0, num = 0;
};

// Runs every instance in index order: pre-attacked instances play their
// materialized order nominally, the rest go through attack_episode when an
// attacker is supplied. The OpenMP path writes into per-index slots and
// aggregates serially, so reports are identical for any thread count.
EvalReport evaluate(const Dataset& dataset, const PackingPolicy& policy, int window,
                    const Attacker* attacker = nullptr, int threads = 0);

// Reference single-thread implementation; evaluate() must match it exactly.
EvalReport evaluate_serial(const Dataset& dataset, const PackingPolicy& policy, int window,
                           const Attacker* attacker = nullptr);

// Header policy,attacker,N_B,beta,uti,std,num; one row per instance with the
// instance utilization/count and the aggregate Std repeated.
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

void check_mode(const Dataset& dataset, Mode expected);

} // namespace rpack
