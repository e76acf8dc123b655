// SPDX-License-Identifier: Apache-2.0
#include "skipfree/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "skipfree/detail/parallel.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/rng.hpp"
#include "skipfree/series.hpp"

namespace skipfree {

namespace {

constexpr State kCemetery = static_cast<State>(-1);

// Cumulative inversion table of one row, with the leak as a cemetery bucket.
// Buckets are ordered by decreasing mass so a linear scan usually stops after
// a few comparisons; rows where that is not the case fall back to bisection.
struct JumpRow {
    std::vector<double> cumulative;
    std::vector<State> target;
    double total = 0.0;
    bool linear = true;

    // Returns false on absorption.
    bool draw(SplitMixStream& rng, State& x) const {
        const double u = rng.uniform() * total;
        std::size_t k = 0;
        const std::size_t last = cumulative.size() - 1;
        if (linear) {
            while (k < last && u >= cumulative[k]) ++k;
        } else {
            k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                         cumulative.begin());
            k = std::min(k, last);
        }
        x = target[k];
        return x != kCemetery;
    }
};

std::vector<JumpRow> jump_table(std::size_t size, const std::vector<double>& matrix,
                                const std::vector<double>& leak, bool skip_diagonal) {
    std::vector<JumpRow> rows(size);
    std::vector<std::pair<double, State>> buckets;
    for (std::size_t i = 0; i < size; ++i) {
        buckets.clear();
        for (std::size_t j = 0; j < size; ++j) {
            const double v = matrix[i * size + j];
            if (v <= 0.0 || (skip_diagonal && j == i)) continue;
            buckets.emplace_back(v, j);
        }
        if (leak[i] > 0.0) buckets.emplace_back(leak[i], kCemetery);
        if (buckets.empty()) buckets.emplace_back(0.0, kCemetery);
        std::stable_sort(buckets.begin(), buckets.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        JumpRow& r = rows[i];
        double run = 0.0;
        double expected_scan = 0.0;
        for (std::size_t k = 0; k < buckets.size(); ++k) {
            run += buckets[k].first;
            r.cumulative.push_back(run);
            r.target.push_back(buckets[k].second);
            expected_scan += static_cast<double>(k) * buckets[k].first;
        }
        r.total = run;
        r.linear = run > 0.0 && expected_scan / run <= 8.0;
    }
    return rows;
}

SimEstimate summarize(const std::vector<double>& values, const SimOptions& options) {
    SimEstimate est;
    est.replications = values.size();
    est.seed = options.seed;
    const double n = static_cast<double>(values.size());
    est.mean = pairwise_sum(values) / n;
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double d = values[k] - est.mean;
            sq[k] = d * d;
        }
        est.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    return est;
}

void check_common(std::size_t size, std::span<const double> cost, State i, const SimOptions& options) {
    if (options.replications < 1) throw DomainError("simulation needs at least one replication");
    if (cost.size() != size) throw DomainError("cost vector length differs from truncation size");
    if (i >= size) throw DomainError("start state outside the truncated chain");
    for (double c : cost) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("cost must be finite and nonnegative");
    }
}

[[noreturn]] void runaway(std::size_t rep, std::uint64_t steps) {
    throw RunawayError("replication " + std::to_string(rep) + " did not absorb within " +
                       std::to_string(steps) + " steps");
}

} // namespace

SimEstimate simulate_dtmc(const TruncatedChain& tc, std::span<const double> cost, State i,
                          const SimOptions& options) {
    check_common(tc.size(), cost, i, options);
    std::vector<double> values(options.replications, 0.0);
    if (std::all_of(cost.begin(), cost.end(), [](double c) { return c == 0.0; })) {
        return summarize(values, options);
    }
    const std::vector<JumpRow> rows = jump_table(tc.size(), tc.matrix, tc.leak, false);
    detail::parallel_for(options.replications, options.threads, [&](std::size_t rep) {
        SplitMixStream rng(options.seed, rep);
        State x = i;
        NeumaierSum acc;
        std::uint64_t steps = 0;
        do {
            acc.add(cost[x]);
            if (++steps > options.max_steps) runaway(rep, options.max_steps);
        } while (rows[x].draw(rng, x));
        values[rep] = acc.get();
    });
    return summarize(values, options);
}

SimEstimate simulate_ctmc(const TruncatedGenerator& tq, std::span<const double> cost, State i,
                          const SimOptions& options) {
    check_common(tq.size(), cost, i, options);
    std::vector<double> values(options.replications, 0.0);
    if (std::all_of(cost.begin(), cost.end(), [](double c) { return c == 0.0; })) {
        return summarize(values, options);
    }
    const std::vector<JumpRow> rows = jump_table(tq.size(), tq.matrix, tq.leak, true);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        if (!(rows[s].total > 0.0)) {
            throw RunawayError("state " + std::to_string(s) + " of the truncated generator never leaves");
        }
    }
    detail::parallel_for(options.replications, options.threads, [&](std::size_t rep) {
        SplitMixStream rng(options.seed, rep);
        State x = i;
        NeumaierSum acc;
        std::uint64_t steps = 0;
        bool alive = true;
        while (alive) {
            const JumpRow& r = rows[x];
            // The holding time only matters where cost accrues; the jump is
            // drawn independently of it.
            if (cost[x] != 0.0) acc.add(cost[x] * rng.exponential(r.total));
            if (++steps > options.max_steps) runaway(rep, options.max_steps);
            alive = r.draw(rng, x);
        }
        values[rep] = acc.get();
    });
    return summarize(values, options);
}

} // namespace skipfree
