// Compares the OpenMP kernels against their serial reference implementations
// and checks that both produce identical results. Two kernels are data
// parallel here: instance-level evaluation and the per-(s,a) inner problems
// of the adjustable operator.
#include "rpack/harness.hpp"
#include "rpack/mdp.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>

using namespace rpack;

namespace {

template <typename F> double timed(F&& fn, int repeats = 3) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    int instances = 200;
    if (argc > 1) instances = std::atoi(argv[1]);
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("threads: %d\n", threads);

    // Kernel 1: dataset evaluation.
    const Dataset ds = generate(default_spec(Mode::Discrete, 90210, instances, 150));
    const PackingPolicy policy{PolicyKind::Lsah};
    EvalReport serial_rep, parallel_rep;
    const double t_serial = timed([&] { serial_rep = evaluate_serial(ds, policy, 1); });
    const double t_parallel = timed([&] { parallel_rep = evaluate(ds, policy, 1); });
    const bool same = report_csv(serial_rep) == report_csv(parallel_rep);
    std::printf("evaluate (%d instances):  serial %7.3fs  openmp %7.3fs  speedup %.2fx  %s\n",
                instances, t_serial, t_parallel, t_serial / t_parallel,
                same ? "identical" : "MISMATCH");

    // Kernel 2: adjustable robust backup.
    SplitMix64 rng(4711);
    const FiniteMDP m = random_mdp(rng, 30, 6, 0.9);
    const Kernel pw = random_kernel(rng, 30, 6);
    const PolicyMatrix pi = random_policy(rng, 30, 6);
    Value v(30);
    for (double& x : v) x = rng.next_uniform(-1, 1);
    const double rho_prime = model_discrepancy(m.P, pw, 30, 6) + 0.2;
    Value out_serial, out_parallel;
    const double b_serial = timed(
        [&] { out_serial = adjustable_bellman(m, v, pi, m.P, pw, 1.0, rho_prime); });
    const double b_parallel = timed([&] {
        out_parallel = adjustable_bellman(m, v, pi, m.P, pw, 1.0, rho_prime,
                                          InnerForm::Direct, nullptr, true);
    });
    double diff = 0;
    for (size_t i = 0; i < out_serial.size(); ++i)
        diff = std::max(diff, std::abs(out_serial[i] - out_parallel[i]));
    std::printf("adjustable backup (30x6): serial %7.3fs  openmp %7.3fs  speedup %.2fx  %s\n",
                b_serial, b_parallel, b_serial / b_parallel,
                diff == 0.0 ? "identical" : "MISMATCH");
    return (same && diff == 0.0) ? 0 : 1;
}
