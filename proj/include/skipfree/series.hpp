// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skipfree/types.hpp"

#ifdef __FAST_MATH__
#error fast math enabled, this would negate compensation.
#endif

namespace skipfree {

/// Kahan-Babuska-Neumaier running sum.
class NeumaierSum {
public:
    NeumaierSum() = default;
    explicit NeumaierSum(double init) : sum_(init) {}

    void add(double x) noexcept;
    double get() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Order-independent pairwise sum.
double pairwise_sum(std::span<const double> values) noexcept;

/// Stopping rule shared by every series evaluated in the library.
///
/// A nonnegative series is declared Converged once `consecutive` successive
/// terms are each at most `tol` times the running partial sum (and at least
/// `min_terms` terms have been taken). It is Diverged when the partial sum
/// exceeds `divergence_cap`, or when the terms at indices 2^p stop decaying for
/// three checkpoints in a row past `decay_check_start`. Otherwise evaluation
/// stops with IndexCapReached after `index_cap` terms.
struct SeriesPolicy {
    double tol = 1e-10;
    std::size_t consecutive = 5;
    double divergence_cap = 1e12;
    std::size_t index_cap = 100000;
    std::size_t min_terms = 0;
    std::size_t decay_check_start = 1024;  // 0 disables the decay check

    SeriesPolicy with_tol(double t) const {
        SeriesPolicy p = *this;
        p.tol = t;
        return p;
    }
    SeriesPolicy with_min_terms(std::size_t m) const {
        SeriesPolicy p = *this;
        p.min_terms = m;
        return p;
    }
};

class SeriesAccumulator {
public:
    explicit SeriesAccumulator(SeriesPolicy policy);

    /// Adds the next term; returns true once the series is decided.
    bool add(double term);

    bool finished() const noexcept { return finished_; }
    double partial() const noexcept { return sum_.get(); }
    std::size_t terms() const noexcept { return count_; }

    /// Value and status. An undecided series reports IndexCapReached.
    ConvergentValue result() const;

private:
    SeriesPolicy policy_;
    NeumaierSum sum_;
    std::size_t count_ = 0;
    std::size_t small_run_ = 0;
    double last_ = 0.0;
    bool finished_ = false;
    Status status_ = Status::IndexCapReached;
    std::vector<double> checkpoints_;
};

} // namespace skipfree
