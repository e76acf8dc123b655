// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include "skipfree/ctmc.hpp"
#include "skipfree/truncation.hpp"

namespace skipfree {

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
};

struct SimOptions {
    std::size_t replications = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;                  // 0: SKIPFREE_THREADS or hardware
    std::uint64_t max_steps = 100000000;   // per replication
};

/// Monte Carlo estimate of E_i[sum_k c(X_k)] for the substochastic chain,
/// where the leaked mass of each row sends the chain to an absorbing cemetery.
/// Throws RunawayError when a replication exceeds max_steps.
SimEstimate simulate_dtmc(const TruncatedChain& tc, std::span<const double> cost, State i,
                          const SimOptions& options = {});

/// Same for E_i[int c(X_t) dt] on a truncated generator: Exp(-Q(x,x)) holding
/// times, jumps by the embedded probabilities, absorption on leaked rate.
SimEstimate simulate_ctmc(const TruncatedGenerator& tq, std::span<const double> cost, State i,
                          const SimOptions& options = {});

} // namespace skipfree
