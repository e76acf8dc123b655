// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "random_chains.hpp"
#include "skipfree/cost.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/kernel.hpp"
#include "skipfree/models.hpp"

using namespace skipfree;
using skipfree::testing::random_downward;
using skipfree::testing::random_upward;

namespace {

bool has_message(const ValidationReport& r, const std::string& text) {
    for (const Violation& v : r.violations) {
        if (v.message == text) return true;
    }
    return false;
}

} // namespace

TEST_CASE("packaged models validate cleanly up to row 200") {
    CHECK(validate_kernel(GiM1Kernel(3.0), 50).ok());
    for (double z : {1.2, 1.5, 2.0, 3.0, 5.0, 10.0}) {
        CHECK(validate_kernel(GiM1Kernel(z), 200).ok());
        CHECK(validate_kernel(MG1Kernel(z), 200).ok());
    }
    CHECK(validate_generator(BirthDeathGenerator(2.0, 1.0), 200).ok());
    CHECK(validate_generator(BirthDeathGenerator({1.0, 2.0, 3.0}, {0.5, 4.0}), 200).ok());
}

TEST_CASE("validation reports a skip above an upward-tagged row") {
    std::vector<std::vector<double>> d = {
        {0.5, 0.5, 0.0, 0.0, 0.0, 0.0},
        {0.3, 0.3, 0.4, 0.0, 0.0, 0.0},
        {0.2, 0.2, 0.2, 0.2, 0.0, 0.2},
        {0.0, 0.0, 0.5, 0.0, 0.5, 0.0},
        {0.0, 0.0, 0.0, 0.5, 0.0, 0.5},
        {0.0, 0.0, 0.0, 0.0, 1.0, 0.0},
    };
    FiniteKernel k(d, Structure::UpwardSkipFree);
    const ValidationReport r = validate_kernel(k, 5);
    CHECK(has_message(r, "skip above at row 2"));
    CHECK(r.violations.size() == 1);
}

TEST_CASE("validation reports a deficient row sum") {
    std::vector<std::vector<double>> d = {
        {0.5, 0.5, 0.0, 0.0},
        {0.5, 0.0, 0.5, 0.0},
        {0.0, 0.5, 0.0, 0.5},
        {0.0, 0.0, 0.4, 0.5},
    };
    FiniteKernel k(d);
    const ValidationReport r = validate_kernel(k, 3);
    CHECK(has_message(r, "row sum 0.9 \xe2\x89\xa0 1 at row 3"));
}

TEST_CASE("validation flags probabilities outside [0,1] and missing up steps") {
    std::vector<std::vector<double>> d = {{1.2, -0.2}, {1.0, 0.0}};
    const ValidationReport r = validate_kernel(FiniteKernel(d), 1);
    CHECK_FALSE(r.ok());
    bool bounds = false;
    for (const Violation& v : r.violations) bounds |= v.kind == "probability-bounds";
    CHECK(bounds);

    std::vector<std::vector<double>> up = {{1.0, 0.0, 0.0}, {0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}};
    const ValidationReport r2 = validate_kernel(FiniteKernel(up, Structure::UpwardSkipFree), 2);
    CHECK(has_message(r2, "P(i,i+1) = 0 at row 0"));
}

TEST_CASE("prefix sums match the GI/M/1 closed form") {
    GiM1Kernel k(3.0);
    CHECK(prefix_sum(k, 2, 0) == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
    CHECK(prefix_sum(k, 1, 0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    for (State n = 1; n <= 40; ++n) {
        for (State kk = 0; kk < n; ++kk) {
            CHECK(prefix_sum(k, n, kk) == doctest::Approx(std::pow(3.0, -double(n - kk + 1))).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(prefix_sum(k, 2, 2), DomainError);
}

TEST_CASE("prefix sum of a row with all mass one step up is zero") {
    std::vector<std::vector<double>> d = {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};
    FiniteKernel k(d);
    CHECK(prefix_sum(k, 1, 0) == 0.0);
}

TEST_CASE("tail sums match the M/G/1 closed form") {
    MG1Kernel k(1.5);
    CHECK(tail_sum(k, 0, 2) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    CHECK(tail_sum(k, 1, 3) == doctest::Approx(8.0 / 27.0).epsilon(1e-15));
    CHECK_THROWS_AS(tail_sum(k, 3, 3), DomainError);
    CHECK_THROWS_AS(tail_sum(k, 3, 1), DomainError);
}

TEST_CASE("tail sum of a finite chain without mass beyond k is zero") {
    std::vector<std::vector<double>> d = {{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}};
    CHECK(tail_sum(FiniteKernel(d), 0, 2) == 0.0);
}

TEST_CASE("tail sums equal the row complement") {
    auto check = [](const TransitionKernel& k, State m_max) {
        std::vector<Entry> r;
        for (State m = 0; m <= m_max; ++m) {
            for (State kk = m + 1; kk <= m + 12; ++kk) {
                k.row(m, kk - 1, r);
                NeumaierSum head;
                for (const Entry& e : r) head.add(e.value);
                CHECK(std::fabs(tail_sum(k, m, kk) - (1.0 - head.get())) <= 1e-12);
            }
        }
    };
    check(MG1Kernel(1.5), 20);
    check(MG1Kernel(3.0), 20);
    check(GiM1Kernel(3.0), 20);
    for (std::uint64_t s = 1; s <= 10; ++s) {
        check(*random_downward(s).kernel, 15);
        check(*random_upward(s).kernel, 15);
    }
}

TEST_CASE("prefix and tail sums are complementary on downward chains") {
    auto check = [](const TransitionKernel& k) {
        for (State n = 1; n <= 25; ++n) {
            const double total = prefix_sum(k, n, n - 1) + k.entry(n, n) + tail_sum(k, n, n + 1);
            CHECK(std::fabs(total - 1.0) <= 1e-12);
        }
    };
    check(MG1Kernel(1.2));
    check(MG1Kernel(1.8));
    for (std::uint64_t s = 1; s <= 10; ++s) check(*random_downward(s).kernel);
}

TEST_CASE("random test chains satisfy their structure tags") {
    for (std::uint64_t s = 1; s <= 40; ++s) {
        CHECK(validate_kernel(*random_upward(s).kernel, 150).ok());
        CHECK(validate_kernel(*random_downward(s).kernel, 150).ok());
    }
}

TEST_CASE("structure detection on dense matrices") {
    CHECK(detect_structure({{0.5, 0.5}, {0.5, 0.5}}) == Structure::BirthDeath);
    CHECK(detect_structure({{0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}, {0.0, 0.5, 0.5}}) == Structure::BirthDeath);
    CHECK(detect_structure({{0.5, 0.0, 0.5}, {0.2, 0.3, 0.5}, {0.0, 0.5, 0.5}}) == Structure::DownwardSkipFree);
    CHECK(detect_structure({{0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}, {0.5, 0.0, 0.5}}) == Structure::UpwardSkipFree);
    CHECK(detect_structure({{0.0, 0.0, 1.0}, {0.2, 0.3, 0.5}, {1.0, 0.0, 0.0}}) == Structure::General);
}

TEST_CASE("cost functions evaluate and guard their values") {
    const CostFunction g = CostFunction::geometric(0.5, 2.0, true);
    CHECK(g(0) == 0.0);
    CHECK(g(3) == doctest::Approx(0.25));
    const CostFunction ind = CostFunction::indicator({4, 1, 4});
    CHECK(ind(1) == 1.0);
    CHECK(ind(4) == 1.0);
    CHECK(ind(2) == 0.0);
    CHECK(ind.horizon() == 5);
    const CostFunction tab = CostFunction::table({1.0, 2.0}, 0.5);
    CHECK(tab(1) == 2.0);
    CHECK(tab(10) == 0.5);
    CHECK(tab.head(3) == std::vector<double>{1.0, 2.0, 0.5});
    CHECK(CostFunction::zero().is_zero());
    CHECK(CostFunction::table({0.0, 0.0}).is_zero());
    CHECK_FALSE(g.is_zero());
    CHECK_THROWS_AS(CostFunction::table({1.0, -1.0}), DomainError);
    CHECK_THROWS_AS(CostFunction::geometric(-0.5), DomainError);
    const CostFunction bad = CostFunction::from_function([](State i) { return i == 3 ? -1.0 : 1.0; }, "bad");
    CHECK(bad(2) == 1.0);
    CHECK_THROWS_AS(bad(3), DomainError);
    const CostFunction inf =
        CostFunction::from_function([](State) { return std::numeric_limits<double>::infinity(); }, "inf");
    CHECK_THROWS_AS(inf(0), DomainError);
}

TEST_CASE("entry lookup scans the row") {
    GiM1Kernel k(3.0);
    CHECK(k.entry(5, 6) == doctest::Approx(2.0 / 3.0));
    CHECK(k.entry(5, 7) == 0.0);
    MG1Kernel m(2.0);
    CHECK(m.entry(3, 2) == doctest::Approx(0.5));
}
