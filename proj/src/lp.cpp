#include "rpack/lp.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace rpack::lp {

namespace {

constexpr double kTol = 1e-9;

struct Tableau {
    int rows = 0, cols = 0; // cols excludes the rhs
    std::vector<double> t;  // rows x (cols + 1)
    std::vector<int> basis;

    double& at(int i, int j) { return t[static_cast<size_t>(i) * (cols + 1) + j]; }
    double rhs(int i) const { return t[static_cast<size_t>(i) * (cols + 1) + cols]; }

    void pivot(int pr, int pc) {
        const double pv = at(pr, pc);
        for (int j = 0; j <= cols; ++j) at(pr, j) /= pv;
        for (int i = 0; i < rows; ++i) {
            if (i == pr) continue;
            const double f = at(i, pc);
            if (f == 0.0) continue;
            for (int j = 0; j <= cols; ++j) at(i, j) -= f * at(pr, j);
        }
        basis[pr] = pc;
    }
};

// Minimizes cost over the tableau with Bland's rule. `allowed` marks columns
// permitted to enter. Returns false if unbounded.
bool run_simplex(Tableau& tab, std::vector<double>& cost, double& objective,
                 const std::vector<bool>& allowed) {
    // Reduce the cost row against the current basis.
    for (int i = 0; i < tab.rows; ++i) {
        const double cb = cost[tab.basis[i]];
        if (cb == 0.0) continue;
        for (int j = 0; j < tab.cols; ++j) cost[j] -= cb * tab.at(i, j);
        objective -= cb * tab.rhs(i);
    }
    for (;;) {
        int enter = -1;
        for (int j = 0; j < tab.cols; ++j)
            if (allowed[j] && cost[j] < -kTol) {
                enter = j;
                break; // Bland: lowest index
            }
        if (enter < 0) return true;
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < tab.rows; ++i) {
            const double a = tab.at(i, enter);
            if (a > kTol) {
                const double ratio = tab.rhs(i) / a;
                if (ratio < best - kTol ||
                    (ratio < best + kTol && (leave < 0 || tab.basis[i] < tab.basis[leave])))
                    best = ratio, leave = i;
            }
        }
        if (leave < 0) return false;
        const double f = cost[enter];
        tab.pivot(leave, enter);
        for (int j = 0; j < tab.cols; ++j) cost[j] -= f * tab.at(leave, j);
        objective -= f * tab.rhs(leave);
        cost[enter] = 0.0;
    }
}

} // namespace

Solution solve(int nvars, const std::vector<double>& c, const std::vector<Constraint>& rows) {
    const int m = static_cast<int>(rows.size());
    // Column layout: structural | slack/surplus | artificial.
    int nslack = 0;
    for (const Constraint& r : rows)
        if (r.rel != Rel::Eq) ++nslack;

    Tableau tab;
    tab.rows = m;
    tab.cols = nvars + nslack + m; // one artificial per row, unused ones stay zero
    tab.t.assign(static_cast<size_t>(m) * (tab.cols + 1), 0.0);
    tab.basis.assign(m, -1);

    int slack_at = nvars;
    const int art_at = nvars + nslack;
    std::vector<bool> is_artificial(tab.cols, false);

    for (int i = 0; i < m; ++i) {
        const Constraint& r = rows[i];
        assert(static_cast<int>(r.a.size()) == nvars);
        double sign = 1.0;
        if (r.b < 0) sign = -1.0; // normalize rhs >= 0
        for (int j = 0; j < nvars; ++j) tab.at(i, j) = sign * r.a[j];
        tab.at(i, tab.cols) = sign * r.b;
        Rel rel = r.rel;
        if (sign < 0) rel = (rel == Rel::Le) ? Rel::Ge : (rel == Rel::Ge ? Rel::Le : Rel::Eq);
        if (rel == Rel::Le) {
            tab.at(i, slack_at) = 1.0;
            tab.basis[i] = slack_at++;
        } else {
            if (rel == Rel::Ge) tab.at(i, slack_at++) = -1.0;
            tab.at(i, art_at + i) = 1.0;
            is_artificial[art_at + i] = true;
            tab.basis[i] = art_at + i;
        }
    }

    std::vector<bool> allow_all(tab.cols, true);

    // Phase 1: drive the artificials to zero.
    bool need_phase1 = false;
    for (int i = 0; i < m; ++i)
        if (is_artificial[tab.basis[i]]) need_phase1 = true;
    if (need_phase1) {
        std::vector<double> cost1(tab.cols, 0.0);
        for (int j = 0; j < tab.cols; ++j)
            if (is_artificial[j]) cost1[j] = 1.0;
        double obj1 = 0.0;
        if (!run_simplex(tab, cost1, obj1, allow_all)) return {Status::Infeasible, 0, {}};
        if (-obj1 > 1e-7) return {Status::Infeasible, 0, {}};
        // Pivot lingering artificials out of the basis where possible; rows
        // where that fails are redundant and dropped, otherwise a later pivot
        // could push the artificial positive again.
        for (int i = tab.rows - 1; i >= 0; --i) {
            if (!is_artificial[tab.basis[i]]) continue;
            int pc = -1;
            for (int j = 0; j < art_at; ++j)
                if (std::abs(tab.at(i, j)) > kTol) {
                    pc = j;
                    break;
                }
            if (pc >= 0) {
                tab.pivot(i, pc);
            } else {
                tab.t.erase(tab.t.begin() + static_cast<long>(i) * (tab.cols + 1),
                            tab.t.begin() + static_cast<long>(i + 1) * (tab.cols + 1));
                tab.basis.erase(tab.basis.begin() + i);
                --tab.rows;
            }
        }
    }

    std::vector<bool> allowed(tab.cols, true);
    for (int j = 0; j < tab.cols; ++j)
        if (is_artificial[j]) allowed[j] = false;

    std::vector<double> cost(tab.cols, 0.0);
    for (int j = 0; j < nvars; ++j) cost[j] = c[j];
    double obj = 0.0;
    if (!run_simplex(tab, cost, obj, allowed)) return {Status::Unbounded, 0, {}};

    Solution sol;
    sol.status = Status::Optimal;
    sol.x.assign(nvars, 0.0);
    for (int i = 0; i < tab.rows; ++i)
        if (tab.basis[i] < nvars) sol.x[tab.basis[i]] = tab.rhs(i);
    sol.objective = 0.0;
    for (int j = 0; j < nvars; ++j) sol.objective += c[j] * sol.x[j];
    return sol;
}

} // namespace rpack::lp
