// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <limits>

#include "skipfree/format.hpp"
#include "skipfree/series.hpp"

using namespace skipfree;

TEST_CASE("compensated sums recover cancelled mass") {
    NeumaierSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.get() == 2.0);
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("geometric series converge") {
    SeriesAccumulator acc(SeriesPolicy{});
    double t = 1.0;
    while (!acc.add(t)) t *= 0.5;
    const ConvergentValue v = acc.result();
    CHECK(v.status == Status::Converged);
    CHECK(v.value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(v.last_increment <= 1e-10 * std::max(v.value, 1.0));
}

TEST_CASE("a single small term does not stop a series") {
    SeriesAccumulator acc(SeriesPolicy{});
    const double terms[] = {1.0, 1e-20, 1.0, 1e-20, 1e-20, 1e-20, 1e-20, 1e-20};
    bool done = false;
    for (double t : terms) done = acc.add(t);
    CHECK(done);
    CHECK(acc.terms() == 8);
    CHECK(acc.result().value == doctest::Approx(2.0));
}

TEST_CASE("minimum terms hold back convergence") {
    SeriesAccumulator acc(SeriesPolicy{}.with_min_terms(20));
    std::size_t k = 0;
    while (!acc.add(k < 10 ? 0.0 : 1.0 / double(1ull << (k - 10)))) ++k;
    CHECK(acc.result().converged());
    CHECK(acc.result().value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("divergent and undecided series") {
    SeriesAccumulator grow(SeriesPolicy{});
    while (!grow.add(1e6)) {
    }
    CHECK(grow.result().status == Status::Diverged);
    CHECK(std::isinf(grow.result().value));

    SeriesAccumulator flat(SeriesPolicy{});
    while (!flat.add(0.5)) {
    }
    CHECK(flat.result().status == Status::Diverged);
    CHECK(flat.terms() < 100000);

    SeriesPolicy p;
    p.index_cap = 50;
    p.decay_check_start = 0;
    SeriesAccumulator cap(p);
    while (!cap.add(0.5)) {
    }
    CHECK(cap.result().status == Status::IndexCapReached);
}

TEST_CASE("slowly decaying series are not called divergent by the decay check") {
    SeriesAccumulator acc(SeriesPolicy{}.with_tol(1e-6));
    std::size_t n = 1;
    while (!acc.add(1.0 / std::pow(double(n), 3.0))) ++n;
    CHECK(acc.result().status != Status::Diverged);
}

TEST_CASE("doubles render with 17 significant digits") {
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
    for (double v : {1.0 / 3.0, 5.0 / 6.0, 1e-300, 123456789.123456789, 2.5e17}) {
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
}
