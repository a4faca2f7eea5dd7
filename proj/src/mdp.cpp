#include "rpack/mdp.hpp"

#include "rpack/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace rpack {

double FiniteMDP::rmax() const {
    double m = 0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
}

void FiniteMDP::validate() const {
    if (gamma <= 0 || gamma >= 1)
        throw Error("invalid_spec", "FiniteMDP: gamma must lie in (0,1)");
    for (int s = 0; s < ns; ++s)
        for (int a = 0; a < na; ++a) {
            double sum = 0;
            for (int s2 = 0; s2 < ns; ++s2) {
                const double v = p(s, a, s2);
                if (v < 0) throw Error("invalid_spec", "FiniteMDP: negative probability");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw Error("invalid_spec", "FiniteMDP: row does not sum to one");
        }
}

void RobustConfig::validate() const {
    if (alpha <= 0 || alpha > 1) throw Error("invalid_spec", "alpha must lie in (0,1]");
    if (rho < 0 || rho > 1) throw Error("invalid_spec", "rho must lie in [0,1]");
    if (rho_w < 0 || rho_w > 1) throw Error("invalid_spec", "rho_w must lie in [0,1]");
}

std::span<const double> kernel_row(const Kernel& k, const FiniteMDP& m, int s, int a) {
    return {k.data() + (static_cast<size_t>(s) * m.na + a) * m.ns, static_cast<size_t>(m.ns)};
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw Error("dimension_mismatch", "tv_distance: supports differ in size");
    double l1 = 0;
    for (size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
    return 0.5 * l1;
}

double model_discrepancy(const Kernel& k1, const Kernel& k2, int ns, int na) {
    if (k1.size() != k2.size() || static_cast<size_t>(ns) * na * ns != k1.size())
        throw Error("dimension_mismatch", "model_discrepancy: kernel shapes differ");
    double worst = 0;
    for (int sa = 0; sa < ns * na; ++sa) {
        std::span<const double> a{k1.data() + static_cast<size_t>(sa) * ns,
                                  static_cast<size_t>(ns)};
        std::span<const double> b{k2.data() + static_cast<size_t>(sa) * ns,
                                  static_cast<size_t>(ns)};
        worst = std::max(worst, tv_distance(a, b));
    }
    return worst;
}

namespace {

// Dense Ax = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(a[static_cast<size_t>(i) * n + col]) >
                std::abs(a[static_cast<size_t>(piv) * n + col]))
                piv = i;
        if (std::abs(a[static_cast<size_t>(piv) * n + col]) < 1e-14)
            throw Error("singular_system", "policy_return: singular linear system");
        if (piv != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<size_t>(piv) * n + j],
                          a[static_cast<size_t>(col) * n + j]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[static_cast<size_t>(col) * n + col];
        for (int i = col + 1; i < n; ++i) {
            const double f = a[static_cast<size_t>(i) * n + col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j)
                a[static_cast<size_t>(i) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
            b[i] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= a[static_cast<size_t>(i) * n + j] * x[j];
        x[i] = acc / a[static_cast<size_t>(i) * n + i];
    }
    return x;
}

void check_radius(std::span<const double> nominal, std::span<const double> worst, double alpha,
                  double rho_prime) {
    const double need = alpha * tv_distance(nominal, worst);
    if (rho_prime < need - 1e-12)
        throw Error("infeasible_radius",
                    "mixture set empty: rho' = " + std::to_string(rho_prime) +
                        " < alpha*TV(nominal,worst) = " + std::to_string(need));
}

} // namespace

double policy_return(const FiniteMDP& mdp, const PolicyMatrix& pi, const Kernel& kernel,
                     std::span<const double> mu0) {
    const int n = mdp.ns;
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> rpi(n, 0.0);
    for (int s = 0; s < n; ++s) {
        for (int act = 0; act < mdp.na; ++act) {
            const double w = pi[static_cast<size_t>(s) * mdp.na + act];
            if (w == 0.0) continue;
            rpi[s] += w * mdp.reward(s, act);
            const auto row = kernel_row(kernel, mdp, s, act);
            for (int s2 = 0; s2 < n; ++s2)
                a[static_cast<size_t>(s) * n + s2] -= mdp.gamma * w * row[s2];
        }
        a[static_cast<size_t>(s) * n + s] += 1.0;
    }
    const std::vector<double> v = solve_linear(std::move(a), std::move(rpi), n);
    double eta = 0;
    if (mu0.empty()) {
        for (double x : v) eta += x;
        return eta / n;
    }
    for (int s = 0; s < n; ++s) eta += mu0[s] * v[s];
    return eta;
}

std::pair<double, std::vector<double>> worst_case_row(std::span<const double> value,
                                                      std::span<const double> row,
                                                      double rho_w) {
    const size_t n = row.size();
    std::vector<double> q(row.begin(), row.end());
    size_t lo = 0;
    for (size_t i = 1; i < n; ++i)
        if (value[i] < value[lo]) lo = i;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return value[a] > value[b]; });

    double take = std::min(rho_w, 1.0 - q[lo]);
    double moved = 0;
    for (size_t i : order) {
        if (take <= 0) break;
        // Near-ties do not donate: moving mass between equal values is a
        // no-op, and the tolerance keeps converged-but-wobbly constant value
        // functions on the nominal row.
        if (value[i] <= value[lo] + 1e-9) break;
        const double d = std::min(take, q[i]);
        q[i] -= d;
        take -= d;
        moved += d;
    }
    q[lo] += moved;
    double v = 0;
    for (size_t i = 0; i < n; ++i) v += q[i] * value[i];
    return {v, std::move(q)};
}

Value robust_bellman(const FiniteMDP& mdp, const Value& v, const PolicyMatrix& pi,
                     double rho_w) {
    Value out(mdp.ns, 0.0);
    for (int s = 0; s < mdp.ns; ++s) {
        double acc = 0;
        for (int a = 0; a < mdp.na; ++a) {
            const double w = pi[static_cast<size_t>(s) * mdp.na + a];
            if (w == 0.0) continue;
            const auto [inner, q] = worst_case_row(v, mdp.row(s, a), rho_w);
            acc += w * (mdp.reward(s, a) + mdp.gamma * inner);
        }
        out[s] = acc;
    }
    return out;
}

Kernel worst_case_kernel(const FiniteMDP& mdp, const PolicyMatrix& pi, double rho_w, double tol,
                         int max_iter) {
    Value v(mdp.ns, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        Value next = robust_bellman(mdp, v, pi, rho_w);
        double diff = 0;
        for (int s = 0; s < mdp.ns; ++s) diff = std::max(diff, std::abs(next[s] - v[s]));
        v = std::move(next);
        if (diff < tol) break;
    }
    Kernel k(static_cast<size_t>(mdp.ns) * mdp.na * mdp.ns, 0.0);
    for (int s = 0; s < mdp.ns; ++s)
        for (int a = 0; a < mdp.na; ++a) {
            const auto [inner, q] = worst_case_row(v, mdp.row(s, a), rho_w);
            std::copy(q.begin(), q.end(),
                      k.begin() + (static_cast<size_t>(s) * mdp.na + a) * mdp.ns);
        }
    return k;
}

std::pair<double, std::vector<double>> inner_sup_direct(std::span<const double> value,
                                                        std::span<const double> nominal,
                                                        std::span<const double> worst,
                                                        double alpha, double rho_prime) {
    check_radius(nominal, worst, alpha, rho_prime);
    const int n = static_cast<int>(value.size());
    // Variables: p (n) | u (n) |  w (n); u, w are the L1 epigraph terms.
    const int nv = 3 * n;
    std::vector<double> c(nv, 0.0);
    for (int i = 0; i < n; ++i) c[i] = -value[i]; // maximize V.p

    std::vector<lp::Constraint> rows;
    {
        lp::Constraint sum{std::vector<double>(nv, 0.0), lp::Rel::Eq, 1.0};
        for (int i = 0; i < n; ++i) sum.a[i] = 1.0;
        rows.push_back(std::move(sum));
    }
    for (int i = 0; i < n; ++i) {
        lp::Constraint c1{std::vector<double>(nv, 0.0), lp::Rel::Le, nominal[i]};
        c1.a[i] = 1.0;
        c1.a[n + i] = -1.0;
        rows.push_back(std::move(c1));
        lp::Constraint c2{std::vector<double>(nv, 0.0), lp::Rel::Le, -nominal[i]};
        c2.a[i] = -1.0;
        c2.a[n + i] = -1.0;
        rows.push_back(std::move(c2));
        lp::Constraint c3{std::vector<double>(nv, 0.0), lp::Rel::Le, worst[i]};
        c3.a[i] = 1.0;
        c3.a[2 * n + i] = -1.0;
        rows.push_back(std::move(c3));
        lp::Constraint c4{std::vector<double>(nv, 0.0), lp::Rel::Le, -worst[i]};
        c4.a[i] = -1.0;
        c4.a[2 * n + i] = -1.0;
        rows.push_back(std::move(c4));
    }
    {
        lp::Constraint budget{std::vector<double>(nv, 0.0), lp::Rel::Le, rho_prime};
        for (int i = 0; i < n; ++i) {
            budget.a[n + i] = 0.5;
            budget.a[2 * n + i] = 0.5 * alpha;
        }
        rows.push_back(std::move(budget));
    }

    const lp::Solution sol = lp::solve(nv, c, rows);
    if (sol.status != lp::Status::Optimal)
        throw Error("infeasible_radius", "inner_sup_direct: LP not optimal");
    std::vector<double> p(sol.x.begin(), sol.x.begin() + n);
    return {-sol.objective, std::move(p)};
}

std::pair<double, DualSolution> inner_sup_dual(std::span<const double> value,
                                               std::span<const double> nominal,
                                               std::span<const double> worst, double alpha,
                                               double rho) {
    const double rho_prime = rho * (1.0 + alpha);
    check_radius(nominal, worst, alpha, rho_prime);
    const int n = static_cast<int>(value.size());
    // Variables: mu1+ (n) | mu1- (n) | mu+ | mu- | lambda | t1 (n) | t2 (n),
    // with mu2(i) = (mu - mu1(i)) / alpha substituted away.
    const int m1p = 0, m1n = n, mup = 2 * n, mun = 2 * n + 1, lam = 2 * n + 2;
    const int t1 = 2 * n + 3, t2 = 3 * n + 3;
    const int nv = 4 * n + 3;

    std::vector<double> c(nv, 0.0);
    for (int i = 0; i < n; ++i) {
        c[t1 + i] = nominal[i];
        c[t2 + i] = alpha * worst[i];
    }
    c[mup] = 1.0;
    c[mun] = -1.0;
    c[lam] = rho * (1.0 + alpha);

    std::vector<lp::Constraint> rows;
    const double ia = 1.0 / alpha;
    for (int i = 0; i < n; ++i) {
        // t1_i + mu1_i >= V_i
        lp::Constraint r1{std::vector<double>(nv, 0.0), lp::Rel::Ge, value[i]};
        r1.a[t1 + i] = 1.0;
        r1.a[m1p + i] = 1.0;
        r1.a[m1n + i] = -1.0;
        rows.push_back(std::move(r1));
        // t2_i + (mu - mu1_i)/alpha >= V_i
        lp::Constraint r2{std::vector<double>(nv, 0.0), lp::Rel::Ge, value[i]};
        r2.a[t2 + i] = 1.0;
        r2.a[mup] = ia;
        r2.a[mun] = -ia;
        r2.a[m1p + i] = -ia;
        r2.a[m1n + i] = ia;
        rows.push_back(std::move(r2));
        // lambda >= V_i - mu1_i
        lp::Constraint r3{std::vector<double>(nv, 0.0), lp::Rel::Ge, value[i]};
        r3.a[lam] = 1.0;
        r3.a[m1p + i] = 1.0;
        r3.a[m1n + i] = -1.0;
        rows.push_back(std::move(r3));
        // lambda >= V_i - mu2_i
        lp::Constraint r4{std::vector<double>(nv, 0.0), lp::Rel::Ge, value[i]};
        r4.a[lam] = 1.0;
        r4.a[mup] = ia;
        r4.a[mun] = -ia;
        r4.a[m1p + i] = -ia;
        r4.a[m1n + i] = ia;
        rows.push_back(std::move(r4));
    }

    const lp::Solution sol = lp::solve(nv, c, rows);
    if (sol.status == lp::Status::Unbounded)
        throw Error("infeasible_radius",
                    "inner_sup_dual: dual unbounded (restricted mixture set empty)");
    if (sol.status != lp::Status::Optimal)
        throw Error("infeasible_radius", "inner_sup_dual: LP not optimal");

    DualSolution d;
    d.lambda = sol.x[lam];
    d.mu = sol.x[mup] - sol.x[mun];
    d.mu1.resize(n);
    d.mu2.resize(n);
    for (int i = 0; i < n; ++i) {
        d.mu1[i] = sol.x[m1p + i] - sol.x[m1n + i];
        d.mu2[i] = (d.mu - d.mu1[i]) / alpha;
    }
    return {sol.objective / (1.0 + alpha), std::move(d)};
}

Value adjustable_bellman(const FiniteMDP& mdp, const Value& v, const PolicyMatrix& pi,
                         const Kernel& nominal, const Kernel& worst, double alpha,
                         double rho_prime, InnerForm form, Kernel* argmax_out, bool parallel) {
    const int ns = mdp.ns, na = mdp.na;
    std::vector<double> inner(static_cast<size_t>(ns) * na, 0.0);
    if (argmax_out) argmax_out->assign(static_cast<size_t>(ns) * na * ns, 0.0);

    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int sa = 0; sa < ns * na; ++sa) {
        if (err) continue;
        const int s = sa / na, a = sa % na;
        try {
            const auto pn = kernel_row(nominal, mdp, s, a);
            const auto pw = kernel_row(worst, mdp, s, a);
            if (form == InnerForm::Direct) {
                auto [val, row] = inner_sup_direct(v, pn, pw, alpha, rho_prime);
                inner[sa] = val;
                if (argmax_out)
                    std::copy(row.begin(), row.end(),
                              argmax_out->begin() + static_cast<size_t>(sa) * ns);
            } else {
                inner[sa] = inner_sup_dual(v, pn, pw, alpha, rho_prime / (1.0 + alpha)).first;
            }
        } catch (const Error& e) {
#pragma omp critical
            if (!err)
                err = std::make_exception_ptr(
                    Error(e.code, std::string(e.what()) + " at (s=" + std::to_string(s) +
                                      ", a=" + std::to_string(a) + ")"));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    Value out(ns, 0.0);
    for (int s = 0; s < ns; ++s) {
        double acc = 0;
        for (int a = 0; a < na; ++a) {
            const double w = pi[static_cast<size_t>(s) * na + a];
            if (w == 0.0) continue;
            acc += w * (mdp.reward(s, a) + mdp.gamma * inner[static_cast<size_t>(s) * na + a]);
        }
        out[s] = acc;
    }
    return out;
}

FixedPointResult fixed_point(const FiniteMDP& mdp, const PolicyMatrix& pi, const Kernel& nominal,
                             const Kernel& worst, double alpha, double rho_prime, InnerForm form,
                             double tol, int max_iter, bool parallel, const Value& start) {
    FixedPointResult res;
    if (start.empty())
        res.value.assign(mdp.ns, 0.0);
    else
        res.value = start;
    for (int it = 1; it <= max_iter; ++it) {
        Value next = adjustable_bellman(mdp, res.value, pi, nominal, worst, alpha, rho_prime,
                                        form, nullptr, parallel);
        double diff = 0;
        for (int s = 0; s < mdp.ns; ++s) diff = std::max(diff, std::abs(next[s] - res.value[s]));
        res.value = std::move(next);
        res.iterations = it;
        if (diff < tol) {
            if (form == InnerForm::Direct)
                adjustable_bellman(mdp, res.value, pi, nominal, worst, alpha, rho_prime, form,
                                   &res.mixture, parallel);
            return res;
        }
    }
    throw Error("non_convergence", "fixed_point: no convergence after max iterations");
}

BoundCheck return_bound_check(const FiniteMDP& mdp, const PolicyMatrix& pi, const Kernel& nominal,
                          const Kernel& worst, const Kernel& mixture, double alpha,
                          std::span<const double> mu0) {
    BoundCheck b;
    const double eta_o = policy_return(mdp, pi, nominal, mu0);
    const double eta_w = policy_return(mdp, pi, worst, mu0);
    const double eta_m = policy_return(mdp, pi, mixture, mu0);
    const double d_o = model_discrepancy(mixture, nominal, mdp.ns, mdp.na);
    const double d_w = model_discrepancy(mixture, worst, mdp.ns, mdp.na);
    const double coef =
        2.0 * mdp.gamma * mdp.rmax() / ((1.0 - mdp.gamma) * (1.0 - mdp.gamma));
    b.lhs = eta_o + alpha * eta_w;
    b.rhs = (1.0 + alpha) * eta_m - coef * (d_o + alpha * d_w);
    b.holds = b.lhs >= b.rhs - 1e-9;
    return b;
}

RobustSolveResult adjustable_policy_iteration(const FiniteMDP& mdp, const RobustConfig& cfg, int max_rounds) {
    cfg.validate();
    mdp.validate();
    const int ns = mdp.ns, na = mdp.na;

    RobustSolveResult res;
    res.policy.assign(ns, 0);
    std::map<std::vector<int>, double> seen; // policy -> weighted objective

    for (int round = 1; round <= max_rounds; ++round) {
        res.iterations = round;
        const PolicyMatrix pim = deterministic_policy(res.policy, na);

        // (1) attacker best response
        res.worst = worst_case_kernel(mdp, pim, cfg.rho_w);
        // (2) policy evaluation under the mixture set
        FixedPointResult fp = fixed_point(mdp, pim, mdp.P, res.worst, cfg.alpha,
                                          cfg.rho_prime(), InnerForm::Direct);
        res.value = fp.value;
        res.mixture = fp.mixture;

        const double objective = policy_return(mdp, pim, mdp.P) +
                                 cfg.alpha * policy_return(mdp, pim, res.worst);
        seen[res.policy] = objective;

        // (3) greedy improvement on the mixture kernel
        std::vector<int> improved(ns, 0);
        for (int s = 0; s < ns; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < na; ++a) {
                const auto row = kernel_row(res.mixture, mdp, s, a);
                double q = mdp.reward(s, a);
                for (int s2 = 0; s2 < ns; ++s2) q += mdp.gamma * row[s2] * res.value[s2];
                if (q > best + 1e-12) {
                    best = q;
                    improved[s] = a;
                }
            }
        }
        if (improved == res.policy) return res;
        if (seen.count(improved)) {
            // Oscillation: return the best policy encountered so far.
            res.cycle_detected = true;
            auto best = seen.begin();
            for (auto it = seen.begin(); it != seen.end(); ++it)
                if (it->second > best->second) best = it;
            res.policy = best->first;
            const PolicyMatrix pim2 = deterministic_policy(res.policy, na);
            res.worst = worst_case_kernel(mdp, pim2, cfg.rho_w);
            FixedPointResult fp2 = fixed_point(mdp, pim2, mdp.P, res.worst, cfg.alpha,
                                               cfg.rho_prime(), InnerForm::Direct);
            res.value = fp2.value;
            res.mixture = fp2.mixture;
            return res;
        }
        res.policy = improved;
    }
    throw Error("non_convergence", "adjustable_policy_iteration: no convergence");
}

FiniteMDP random_mdp(SplitMix64& rng, int ns, int na, double gamma) {
    FiniteMDP m;
    m.ns = ns;
    m.na = na;
    m.gamma = gamma;
    m.P = random_kernel(rng, ns, na);
    m.r.resize(static_cast<size_t>(ns) * na);
    for (double& x : m.r) x = rng.next_uniform(-1.0, 1.0);
    return m;
}

Kernel random_kernel(SplitMix64& rng, int ns, int na) {
    Kernel k(static_cast<size_t>(ns) * na * ns);
    for (int sa = 0; sa < ns * na; ++sa) {
        double sum = 0;
        for (int s2 = 0; s2 < ns; ++s2) {
            // Floor keeps rows full-support so the dual form applies.
            const double v = 0.05 + rng.next_double();
            k[static_cast<size_t>(sa) * ns + s2] = v;
            sum += v;
        }
        for (int s2 = 0; s2 < ns; ++s2) k[static_cast<size_t>(sa) * ns + s2] /= sum;
    }
    return k;
}

PolicyMatrix random_policy(SplitMix64& rng, int ns, int na) {
    PolicyMatrix pi(static_cast<size_t>(ns) * na);
    for (int s = 0; s < ns; ++s) {
        double sum = 0;
        for (int a = 0; a < na; ++a) {
            const double v = 0.05 + rng.next_double();
            pi[static_cast<size_t>(s) * na + a] = v;
            sum += v;
        }
        for (int a = 0; a < na; ++a) pi[static_cast<size_t>(s) * na + a] /= sum;
    }
    return pi;
}

PolicyMatrix uniform_policy(int ns, int na) {
    return PolicyMatrix(static_cast<size_t>(ns) * na, 1.0 / na);
}

PolicyMatrix deterministic_policy(const std::vector<int>& actions, int na) {
    PolicyMatrix pi(actions.size() * na, 0.0);
    for (size_t s = 0; s < actions.size(); ++s) pi[s * na + actions[s]] = 1.0;
    return pi;
}

} // namespace rpack
