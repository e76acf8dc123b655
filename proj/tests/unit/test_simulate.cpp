// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "random_chains.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/models.hpp"
#include "skipfree/simulate.hpp"

using namespace skipfree;
using namespace skipfree::testing;

namespace {

bool covers(const SimEstimate& e, double exact, double k = 4.0) {
    return std::fabs(e.mean - exact) <= k * e.std_error;
}

} // namespace

TEST_CASE("scalar chains") {
    SimOptions opt;
    opt.replications = 200000;
    const TruncatedChain half = TruncatedChain::from_dense({{0.5}});
    const std::vector<double> one = {1.0};
    CHECK(covers(simulate_dtmc(half, one, 0, opt), 2.0));
    const TruncatedGenerator q = TruncatedGenerator::from_dense({{-2.0}});
    CHECK(covers(simulate_ctmc(q, one, 0, opt), 0.5));
}

TEST_CASE("zero cost simulates to exactly zero") {
    const TruncatedChain tc = northwest_truncate(GiM1Kernel(3.0), 50);
    const std::vector<double> c(51, 0.0);
    const SimEstimate e = simulate_dtmc(tc, c, 0);
    CHECK(e.mean == 0.0);
    CHECK(e.std_error == 0.0);
    const TruncatedGenerator tq = truncate_generator(BirthDeathGenerator(2.0, 1.0), 50);
    const SimEstimate f = simulate_ctmc(tq, c, 0);
    CHECK(f.mean == 0.0);
    CHECK(f.std_error == 0.0);
}

TEST_CASE("estimates are reproducible and independent of the thread count") {
    const Truncation t = northwest_truncate(GiM1Kernel(3.0), gim1_example_cost(3.0), 100);
    SimOptions a;
    a.replications = 20000;
    a.seed = 42;
    a.threads = 1;
    SimOptions b = a;
    b.threads = 4;
    const SimEstimate x = simulate_dtmc(t.chain, t.cost, 0, a);
    const SimEstimate y = simulate_dtmc(t.chain, t.cost, 0, b);
    CHECK(x.mean == y.mean);
    CHECK(x.std_error == y.std_error);
    CHECK(x.seed == 42);
    CHECK(x.replications == 20000);
    b.seed = 43;
    CHECK(simulate_dtmc(t.chain, t.cost, 0, b).mean != x.mean);
}

TEST_CASE("runaway replications are reported") {
    const TruncatedChain tc = TruncatedChain::from_dense({{0.0, 1.0}, {1.0, 0.0}});
    const std::vector<double> c = {1.0, 1.0};
    SimOptions opt;
    opt.replications = 2;
    opt.max_steps = 1000;
    CHECK_THROWS_AS(simulate_dtmc(tc, c, 0, opt), RunawayError);
    const TruncatedGenerator tq = TruncatedGenerator::from_dense({{-1.0, 1.0}, {1.0, -1.0}});
    CHECK_THROWS_AS(simulate_ctmc(tq, c, 0, opt), RunawayError);
}

TEST_CASE("argument checks") {
    const TruncatedChain tc = TruncatedChain::from_dense({{0.5}});
    const std::vector<double> c = {1.0};
    SimOptions opt;
    opt.replications = 0;
    CHECK_THROWS_AS(simulate_dtmc(tc, c, 0, opt), DomainError);
    CHECK_THROWS_AS(simulate_dtmc(tc, c, 1), DomainError);
    const std::vector<double> neg = {-1.0};
    CHECK_THROWS_AS(simulate_dtmc(tc, neg, 0), DomainError);
}

TEST_CASE("four standard errors cover the exact solve on random chains") {
    SimOptions opt;
    opt.replications = 4000;
    int covered = 0;
    int used = 0;
    for (std::uint64_t s = 1; s <= 80; ++s) {
        const RandomChain c = s % 2 ? random_upward(s) : random_downward(s);
        const Truncation t = northwest_truncate(*c.kernel, c.cost, 40);
        // skip chains whose mean absorption time makes 4000 replications slow
        const std::vector<double> ones(t.cost.size(), 1.0);
        if (solve_truncated_potential(t.chain, ones).phi[0] > 2000.0) continue;
        const double exact = solve_truncated_potential(t.chain, t.cost).phi[0];
        opt.seed = s;
        ++used;
        if (covers(simulate_dtmc(t.chain, t.cost, 0, opt), exact)) ++covered;
    }
    CHECK(used >= 30);
    CHECK(covered >= used - 2);
}

TEST_CASE("continuous-time estimates cover the exact solve") {
    SimOptions opt;
    opt.replications = 50000;
    const TruncatedGenerator tq = truncate_generator(BirthDeathGenerator(2.0, 1.0), 60);
    const std::vector<double> c = CostFunction::indicator({0}).head(61);
    const std::vector<double> exact = ctmc_truncated_potential(tq, c).phi;
    for (State i : {0, 2}) CHECK(covers(simulate_ctmc(tq, c, i, opt), exact[i]));
}
