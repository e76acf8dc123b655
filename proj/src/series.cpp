// SPDX-License-Identifier: Apache-2.0
#include "skipfree/series.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace skipfree {

void NeumaierSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
        carry_ += (sum_ - t) + x;
    } else {
        carry_ += (x - t) + sum_;
    }
    sum_ = t;
}

double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t kLeaf = 16;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SeriesAccumulator::SeriesAccumulator(SeriesPolicy policy) : policy_(policy) {}

bool SeriesAccumulator::add(double term) {
    if (finished_) return true;
    sum_.add(term);
    ++count_;
    last_ = term;
    const double partial = sum_.get();

    if (!std::isfinite(partial) || partial > policy_.divergence_cap) {
        finished_ = true;
        status_ = Status::Diverged;
        return true;
    }

    if (std::fabs(term) <= policy_.tol * std::fabs(partial)) {
        ++small_run_;
    } else {
        small_run_ = 0;
    }
    if (small_run_ >= policy_.consecutive && count_ >= policy_.min_terms) {
        finished_ = true;
        status_ = Status::Converged;
        return true;
    }

    if (policy_.decay_check_start != 0 && std::has_single_bit(count_)) {
        checkpoints_.push_back(term);
        const std::size_t k = checkpoints_.size();
        if (count_ >= policy_.decay_check_start && k >= 3) {
            const double a = checkpoints_[k - 3];
            const double b = checkpoints_[k - 2];
            const double c = checkpoints_[k - 1];
            if (a > 0.0 && b >= a && c >= b) {
                finished_ = true;
                status_ = Status::Diverged;
                return true;
            }
        }
    }

    if (count_ >= policy_.index_cap) {
        finished_ = true;
        status_ = Status::IndexCapReached;
        return true;
    }
    return false;
}

ConvergentValue SeriesAccumulator::result() const {
    ConvergentValue out;
    out.status = finished_ ? status_ : Status::IndexCapReached;
    out.value = out.status == Status::Diverged ? std::numeric_limits<double>::infinity()
                                               : sum_.get();
    out.terms_used = count_;
    out.last_increment = last_;
    return out;
}

} // namespace skipfree
