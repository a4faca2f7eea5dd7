#pragma once

#include "rpack/geometry.hpp" // Error
#include "rpack/rng.hpp"

#include <span>
#include <vector>

namespace rpack {

using Kernel = std::vector<double>;       // [s][a][s'], row-stochastic per (s,a)
using PolicyMatrix = std::vector<double>; // [s][a], row-stochastic per s
using Value = std::vector<double>;        // [s]

/// Explicit finite MDP. The transition kernel is the nominal dynamics; the
/// worst-case and mixture kernels produced by the operators below share its
/// shape.
struct FiniteMDP {
    int ns = 0, na = 0;
    Kernel P;              // nominal dynamics
    std::vector<double> r; // [s][a]
    double gamma = 0.9;

    double p(int s, int a, int s2) const {
        return P[(static_cast<size_t>(s) * na + a) * ns + s2];
    }
    std::span<const double> row(int s, int a) const {
        return {P.data() + (static_cast<size_t>(s) * na + a) * ns, static_cast<size_t>(ns)};
    }
    double reward(int s, int a) const { return r[static_cast<size_t>(s) * na + a]; }
    double rmax() const;

    // Row sums within 1e-12 of one, entries non-negative, gamma in (0,1).
    void validate() const;
};

std::span<const double> kernel_row(const Kernel& k, const FiniteMDP& m, int s, int a);

/// Robustness configuration: alpha is the robustness weight, rho the
/// normalized radius, rho_prime = rho * (1 + alpha) the raw mixture radius,
/// rho_w the radius of the worst-case uncertainty set.
struct RobustConfig {
    double alpha = 1.0;
    double rho = 0.1;
    double rho_w = 0.1;

    double rho_prime() const { return rho * (1.0 + alpha); }
    void validate() const;
};

/// Multipliers of the dual inner problem: lambda >= max_s{V - mu1(s),
/// V - mu2(s), 0} and mu = mu1(s) + alpha*mu2(s) for every s.
struct DualSolution {
    double lambda = 0;
    std::vector<double> mu1, mu2;
    double mu = 0;
};

// --- distances -------------------------------------------------------------

// Total variation distance, 0.5 * L1. Throws Error("dimension_mismatch").
double tv_distance(std::span<const double> p, std::span<const double> q);

// max over (s,a) of the per-row TV distance.
double model_discrepancy(const Kernel& k1, const Kernel& k2, int ns, int na);

// --- exact returns ----------------------------------------------------------

// Exact discounted return mu0' (I - gamma P_pi)^-1 r_pi via a dense linear
// solve. mu0 empty means uniform.
double policy_return(const FiniteMDP& mdp, const PolicyMatrix& pi, const Kernel& kernel,
                     std::span<const double> mu0 = {});

// --- worst-case (robust) operator -------------------------------------------

// min over the TV ball of radius rho_w around `row` of the expectation of V,
// solved exactly by shifting mass from the highest-value states onto the
// lowest. A constant V returns the row unchanged.
std::pair<double, std::vector<double>> worst_case_row(std::span<const double> value,
                                                      std::span<const double> row, double rho_w);

// One application of the robust operator for pi around nominal dynamics.
Value robust_bellman(const FiniteMDP& mdp, const Value& v, const PolicyMatrix& pi, double rho_w);

// Minimizing kernel at the fixed point of the robust operator: the tabular
// stand-in for the attacker-induced worst-case dynamics.
Kernel worst_case_kernel(const FiniteMDP& mdp, const PolicyMatrix& pi, double rho_w,
                         double tol = 1e-12, int max_iter = 1000000);

// --- adjustable (mixture) operator -------------------------------------------

// Largest expectation of V over rows p with
//   TV(p, nominal) + alpha * TV(p, worst) <= rho_prime,
// solved as an epigraph LP over the simplex. Returns the optimum and the
// maximizing row. Throws Error("infeasible_radius") when the set is empty,
// i.e. rho_prime < alpha * TV(nominal, worst).
std::pair<double, std::vector<double>> inner_sup_direct(std::span<const double> value,
                                                        std::span<const double> nominal,
                                                        std::span<const double> worst,
                                                        double alpha, double rho_prime);

// The same optimum through the Lagrangian dual: an LP in (mu1, mu, lambda)
// with mu2(s) = (mu - mu1(s)) / alpha eliminated. Matches inner_sup_direct
// wherever both kernels have full support.
std::pair<double, DualSolution> inner_sup_dual(std::span<const double> value,
                                               std::span<const double> nominal,
                                               std::span<const double> worst, double alpha,
                                               double rho);

enum class InnerForm { Direct, Dual };

// One application of the adjustable robust operator. argmax_out, when given,
// receives the maximizing mixture kernel (Direct form only). `parallel`
// distributes the per-(s,a) inner problems across OpenMP threads; results are
// identical to the serial path.
Value adjustable_bellman(const FiniteMDP& mdp, const Value& v, const PolicyMatrix& pi,
                         const Kernel& nominal, const Kernel& worst, double alpha,
                         double rho_prime, InnerForm form = InnerForm::Direct,
                         Kernel* argmax_out = nullptr, bool parallel = false);

struct FixedPointResult {
    Value value;
    int iterations = 0;
    Kernel mixture; // argmax kernel at the fixed point (Direct form)
};

// Value iteration with the adjustable operator to sup-norm tolerance,
// starting from `start` (zeros when empty). Throws Error("non_convergence")
// past max_iter.
FixedPointResult fixed_point(const FiniteMDP& mdp, const PolicyMatrix& pi, const Kernel& nominal,
                             const Kernel& worst, double alpha, double rho_prime,
                             InnerForm form = InnerForm::Direct, double tol = 1e-10,
                             int max_iter = 100000, bool parallel = false,
                             const Value& start = {});

// --- bound and solver --------------------------------------------------------

struct BoundCheck {
    double lhs = 0, rhs = 0;
    bool holds = false;
};

// Weighted-return lower bound: lhs = eta(pi,nominal) + alpha*eta(pi,worst),
// rhs = (1+alpha)*eta(pi,mixture) - 2*gamma*rmax/(1-gamma)^2 *
//       (d(mixture,nominal) + alpha*d(mixture,worst)).
BoundCheck return_bound_check(const FiniteMDP& mdp, const PolicyMatrix& pi, const Kernel& nominal,
                          const Kernel& worst, const Kernel& mixture, double alpha,
                          std::span<const double> mu0 = {});

struct RobustSolveResult {
    std::vector<int> policy; // deterministic, one action per state
    Value value;
    Kernel worst;
    Kernel mixture;
    int iterations = 0;
    bool cycle_detected = false;
};

// Tabular policy iteration against the adjustable operator: alternates the
// worst-case best response, mixture policy evaluation, and greedy improvement
// on Q(s,a) = r + gamma E_mixture[V]. On a policy cycle the best policy seen
// under the weighted objective is returned with the cycle flag set.
RobustSolveResult adjustable_policy_iteration(const FiniteMDP& mdp, const RobustConfig& cfg,
                                 int max_rounds = 200);

// --- random suites ------------------------------------------------------------

// Full-support random MDPs and kernels for the property suites.
FiniteMDP random_mdp(SplitMix64& rng, int ns, int na, double gamma);
Kernel random_kernel(SplitMix64& rng, int ns, int na);
PolicyMatrix random_policy(SplitMix64& rng, int ns, int na);
PolicyMatrix uniform_policy(int ns, int na);
PolicyMatrix deterministic_policy(const std::vector<int>& actions, int na);

} // namespace rpack
