#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rpack/lp.hpp"
#include "rpack/rng.hpp"

using namespace rpack;

TEST_CASE("two-variable LP with known optimum") {
    // min -x - 2y s.t. x + y <= 4, x <= 3, y <= 2 -> (2, 2), objective -6
    std::vector<lp::Constraint> rows;
    rows.push_back({{1, 1}, lp::Rel::Le, 4});
    rows.push_back({{1, 0}, lp::Rel::Le, 3});
    rows.push_back({{0, 1}, lp::Rel::Le, 2});
    const lp::Solution s = lp::solve(2, {-1, -2}, rows);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(-6).epsilon(1e-9));
    CHECK(s.x[0] == doctest::Approx(2).epsilon(1e-9));
    CHECK(s.x[1] == doctest::Approx(2).epsilon(1e-9));
}

TEST_CASE("equality and >= constraints") {
    // min x + y s.t. x + y = 1, x >= 0.25 -> (1, 0) not allowed; optimum 1
    std::vector<lp::Constraint> rows;
    rows.push_back({{1, 1}, lp::Rel::Eq, 1});
    rows.push_back({{1, 0}, lp::Rel::Ge, 0.25});
    const lp::Solution s = lp::solve(2, {1, 1}, rows);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(1).epsilon(1e-9));
    CHECK(s.x[0] >= 0.25 - 1e-9);
}

TEST_CASE("infeasible and unbounded detection") {
    std::vector<lp::Constraint> rows;
    rows.push_back({{1}, lp::Rel::Ge, 2});
    rows.push_back({{1}, lp::Rel::Le, 1});
    CHECK(lp::solve(1, {1}, rows).status == lp::Status::Infeasible);

    std::vector<lp::Constraint> rows2;
    rows2.push_back({{1, -1}, lp::Rel::Le, 1});
    CHECK(lp::solve(2, {0, -1}, rows2).status == lp::Status::Unbounded);
}

TEST_CASE("redundant equality rows are handled") {
    std::vector<lp::Constraint> rows;
    rows.push_back({{1, 1}, lp::Rel::Eq, 1});
    rows.push_back({{2, 2}, lp::Rel::Eq, 2}); // same hyperplane
    const lp::Solution s = lp::solve(2, {1, 2}, rows);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("random bounded LPs satisfy their constraints at the optimum") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + rng.next_int(0, 2);
        std::vector<lp::Constraint> rows;
        // Box bounds keep the problem bounded.
        for (int i = 0; i < n; ++i) {
            lp::Constraint r{std::vector<double>(n, 0.0), lp::Rel::Le,
                             rng.next_uniform(0.5, 3.0)};
            r.a[i] = 1.0;
            rows.push_back(std::move(r));
        }
        for (int k = 0; k < 3; ++k) {
            lp::Constraint r{std::vector<double>(n, 0.0), lp::Rel::Le,
                             rng.next_uniform(0.5, 4.0)};
            for (int i = 0; i < n; ++i) r.a[i] = rng.next_uniform(-1.0, 1.0);
            rows.push_back(std::move(r));
        }
        std::vector<double> c(n);
        for (double& x : c) x = rng.next_uniform(-1.0, 1.0);
        const lp::Solution s = lp::solve(n, c, rows);
        REQUIRE(s.status == lp::Status::Optimal);
        for (const lp::Constraint& r : rows) {
            double lhs = 0;
            for (int i = 0; i < n; ++i) lhs += r.a[i] * s.x[i];
            CHECK(lhs <= r.b + 1e-7);
        }
        for (double x : s.x) CHECK(x >= -1e-9);
    }
}
