#pragma once

#include <vector>

namespace rpack::lp {

enum class Rel { Le, Eq, Ge };

struct Constraint {
    std::vector<double> a;
    Rel rel = Rel::Le;
    double b = 0;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0;
    std::vector<double> x;
};

// Minimizes c.x subject to the constraints and x >= 0, via a dense two-phase
// tableau simplex with Bland's rule. Meant for the small problems here
// (tens of variables); no sparsity, no scaling.
Solution solve(int nvars, const std::vector<double>& c, const std::vector<Constraint>& rows);

} // namespace rpack::lp
