// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "random_chains.hpp"
#include "skipfree/coefficients.hpp"
#include "skipfree/downward.hpp"
#include "skipfree/models.hpp"
#include "skipfree/truncation.hpp"

using namespace skipfree;
using namespace skipfree::testing;

TEST_CASE("H table of M/G/1") {
    CHECK(h_table(MG1Kernel(1.5), 3).at(2) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(h_table(MG1Kernel(2.0), 4).at(1) == doctest::Approx(0.5).epsilon(1e-14));
    for (double z : {1.2, 1.5, 1.8, 2.0, 3.0}) {
        for (State i : {1, 7, 60}) {
            const HTable t = h_table(MG1Kernel(z), i);
            CHECK(t.at(i) == 1.0);
            for (State m = 1; m <= i; ++m) CHECK(rel_err(t.at(m), mg1_closed_h(z, m, i)) <= 1e-12);
        }
    }
}

TEST_CASE("lemma tail on the M/G/1 example") {
    for (double z : {1.2, 1.5, 1.8}) {
        const MG1Kernel k(z);
        const CostFunction c = mg1_example_cost(z);
        for (State m : {1, 2, 5}) {
            // The closed form sums k up to infinity; horizon 400 leaves a tail below 1e-12.
            CHECK(rel_err(lemma_sum_downward(k, c, m, 400), mg1_closed_lemma_tail(z, m)) <= 1e-10);
        }
    }
    CHECK(mg1_closed_lemma_tail(1.5, 1) == doctest::Approx(1.0 / (0.5 * 1.5) + 1.0));
}

TEST_CASE("downward lemma sum equals the backward recursion") {
    for (std::uint64_t s = 1; s <= 60; ++s) {
        const RandomChain c = random_downward(s);
        for (State n : {6, 12, 30}) {
            const std::vector<double> h = backward_h(*c.kernel, c.cost, n);
            for (State i = 1; i <= n; ++i) {
                CHECK(rel_err(lemma_sum_downward(*c.kernel, c.cost, i, n), h[i]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("proof identity m(i) = H_i^(n+1)") {
    auto check = [](const TransitionKernel& k, State n) {
        const HTable next = h_table(k, n + 1);
        std::vector<HTable> tables;
        for (State kk = 1; kk <= n; ++kk) tables.push_back(h_table(k, kk));
        for (State i = 1; i <= n; ++i) {
            NeumaierSum m;
            for (State kk = i; kk <= n; ++kk) {
                m.add(tables[kk - 1].at(i) * tail_sum(k, kk, n + 1) / k.entry(kk, kk - 1));
            }
            CHECK(rel_err(m.get(), next.at(i)) <= 1e-10);
        }
    };
    for (double z : {1.2, 1.5, 2.0, 3.0}) {
        for (State n : {1, 10, 50}) check(MG1Kernel(z), n);
    }
    for (std::uint64_t s = 1; s <= 10; ++s) check(*random_downward(s).kernel, 50);
}

TEST_CASE("M/G/1 intermediate sums") {
    for (double z : {1.2, 1.5, 1.8, 2.5, 3.0}) {
        const MG1Kernel k(z);
        for (State n : {2, 5, 20}) {
            const HTable t = h_table(k, n);
            NeumaierSum den;
            for (State kk = 1; kk <= n; ++kk) den.add(tail_sum(k, 0, kk) * t.at(kk));
            CHECK(rel_err(den.get(), mg1_closed_denominator(z, n)) <= 1e-10);
            for (State i = 0; i < n; ++i) {
                NeumaierSum num;
                for (State kk = i + 1; kk <= n; ++kk) num.add(t.at(kk));
                CHECK(rel_err(num.get(), mg1_closed_numerator(z, i, n)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("delta and M on the M/G/1 example") {
    CHECK(delta(MG1Kernel(1.5), mg1_example_cost(1.5)).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(delta(MG1Kernel(1.2), mg1_example_cost(1.2)).value == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(delta(MG1Kernel(1.8), mg1_example_cost(1.8)).value == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(m_ratio(MG1Kernel(1.5), 0).verdict.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m_ratio(MG1Kernel(1.5), 2).verdict.value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m_ratio(MG1Kernel(1.8), 1).verdict.value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(m_ratio(MG1Kernel(2.0), 0).verdict.status == Status::Diverged);
    CHECK(m_ratio(MG1Kernel(3.0), 0).verdict.status == Status::Diverged);
}

TEST_CASE("an analytic M override is used when registered") {
    DownwardOptions opt;
    opt.analytic_m = [](State i) { return mg1_closed_m(1.5, i); };
    const RatioLimit r = m_ratio(MG1Kernel(1.5), 3, opt);
    CHECK(r.verdict.value == mg1_closed_m(1.5, 3));
    CHECK(potential_downward(MG1Kernel(1.5), mg1_example_cost(1.5), 1, opt).value ==
          doctest::Approx(5.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("ratios r_n(i) never exceed r_n(0)") {
    auto check = [](const TransitionKernel& k) {
        const RowMatrixDownward coeffs(k);
        for (State n : {8, 20, 45}) {
            const HTable t = h_table(coeffs, n);
            NeumaierSum den;
            for (State kk = 1; kk <= n; ++kk) den.add(tail_sum(k, 0, kk) * t.scaled[kk - 1]);
            std::vector<double> r(n);
            for (State i = 0; i < n; ++i) {
                NeumaierSum num;
                for (State kk = i + 1; kk <= n; ++kk) num.add(t.scaled[kk - 1]);
                r[i] = num.get() / den.get();
            }
            for (State i = 1; i < n; ++i) CHECK(r[i] <= r[0] * (1.0 + 1e-12));
        }
    };
    for (double z : {1.2, 1.5, 2.0, 3.0}) check(MG1Kernel(z));
    for (std::uint64_t s = 1; s <= 20; ++s) check(*random_downward(s).kernel);
}

TEST_CASE("downward potentials on M/G/1") {
    const MG1Kernel k(1.5);
    const CostFunction c = mg1_example_cost(1.5);
    CHECK(potential_downward(k, c, 0).value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(potential_downward(k, c, 1).value == doctest::Approx(5.0 / 6.0).epsilon(1e-8));
    CHECK(potential_downward(k, CostFunction::zero(), 3).value == 0.0);
    for (double z : {1.2, 1.5, 1.8}) {
        const MG1Kernel kz(z);
        std::vector<State> states;
        for (State i = 0; i <= 30; ++i) states.push_back(i);
        const RowMatrixDownward coeffs(kz);
        const std::vector<ConvergentValue> v = potential_downward(coeffs, mg1_example_cost(z), states);
        for (State i = 0; i <= 30; ++i) {
            CHECK(v[i].converged());
            CHECK(rel_err(v[i].value, mg1_closed_potential(z, i)) <= 1e-6);
        }
    }
}

TEST_CASE("M/G/1 potential is not monotone") {
    const MG1Kernel k(1.5);
    const CostFunction c = mg1_example_cost(1.5);
    CHECK(potential_downward(k, c, 1).value > potential_downward(k, c, 0).value);
    CHECK(mg1_closed_potential(1.5, 1) > mg1_closed_potential(1.5, 0));
}

TEST_CASE("downward potentials agree with truncation limits on random chains") {
    int compared = 0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const RandomChain c = random_downward(s);
        if (classify_downward(*c.kernel).verdict != Verdict::Transient) continue;
        const ConvergentValue v = potential_downward(*c.kernel, c.cost, 2);
        const SweepResult r = potential_sweep(*c.kernel, c.cost, 2, default_levels());
        if (!v.converged() || r.verdict.status != Status::Converged) continue;
        CHECK(rel_err(v.value, r.verdict.value) <= 1e-6);
        ++compared;
    }
    CHECK(compared >= 10);
}

TEST_CASE("divergent delta and finitely supported costs") {
    // c = 1 on a transient M/G/1 chain: the expected lifetime is infinite.
    CHECK(potential_downward(MG1Kernel(1.5), CostFunction::constant(1.0), 0).status == Status::Diverged);
    CHECK(delta(MG1Kernel(1.5), CostFunction::constant(1.0)).status == Status::Diverged);
    // D_k grows like 2^k, so delta passes 1e12 yet stays a finite sum.
    const CostFunction far = CostFunction::indicator({45});
    const ConvergentValue d = delta(MG1Kernel(1.5), far);
    CHECK(d.converged());
    CHECK(d.value > 1e12);
    const ConvergentValue v = potential_downward(MG1Kernel(1.5), far, 0);
    REQUIRE(v.converged());
    const Truncation t = northwest_truncate(MG1Kernel(1.5), far, 400);
    CHECK(rel_err(v.value, solve_truncated_potential(t.chain, t.cost).phi[0]) <= 1e-9);
}

TEST_CASE("downward Green entries") {
    const MG1Kernel k(1.5);
    CHECK(green_downward(k, 3, 0).value == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(green_downward(k, 0, 0).value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(green_downward(k, 0, 1).value == doctest::Approx(1.0).epsilon(1e-8));
    const TruncatedChain tc = northwest_truncate(k, 800);
    for (State j : {0, 2, 5}) {
        const std::vector<double> g = truncated_green(tc, j);
        for (State i : {0, 1, 4, 9}) CHECK(rel_err(green_downward(k, i, j).value, g[i]) <= 1e-6);
    }
}

TEST_CASE("Green rows times the cost give the downward potential") {
    for (double z : {1.2, 1.5, 1.8}) {
        const MG1Kernel k(z);
        const CostFunction c = mg1_example_cost(z);
        for (State i : {0, 1, 5, 10}) {
            SeriesAccumulator acc(SeriesPolicy{}.with_min_terms(i + 1));
            for (State j = 0; !acc.add(green_downward(k, i, j).value * c(j)); ++j) {
            }
            CHECK(rel_err(acc.partial(), mg1_closed_potential(z, i)) <= 1e-6);
        }
    }
}

TEST_CASE("downward classification") {
    for (double z : {1.2, 1.5, 1.8}) CHECK(classify_downward(MG1Kernel(z)).verdict == Verdict::Transient);
    for (double z : {2.0, 2.5, 3.0}) CHECK(classify_downward(MG1Kernel(z)).verdict == Verdict::Recurrent);
}
