// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "skipfree/coefficients.hpp"
#include "skipfree/cost.hpp"
#include "skipfree/kernel.hpp"
#include "skipfree/series.hpp"
#include "skipfree/types.hpp"

namespace skipfree {

/// F_n^{(i)} for n = i..n_max, from F_i^{(i)} = 1 and
/// F_n^{(i)} = (1/P(n,n+1)) sum_{k=i..n-1} P_n^{(k-)} F_k^{(i)}.
struct FTable {
    State base = 0;
    std::vector<double> values;  // values[n - base]

    State n_max() const noexcept { return base + values.size() - 1; }
    double at(State n) const { return values.at(n - base); }
};

FTable f_table(const UpwardCoefficients& coeffs, State i, State n_max);
FTable f_table(const TransitionKernel& kernel, State i, State n_max);

/// sum_{k=i..n} F_n^{(k)} c(k) / P(k,k+1), from explicit F tables.
double weighted_sum_lemma(const UpwardCoefficients& coeffs, const CostFunction& cost, State i, State n);
double weighted_sum_lemma(const TransitionKernel& kernel, const CostFunction& cost, State i, State n);

/// phi(i) = sum_{m>=i} t_m with t_m = sum_{k<=m} F_m^{(k)} c(k)/P(k,k+1).
///
/// The terms satisfy t_m = (sum_{k<m} P_m^{(k-)} t_k + c(m)) / P(m,m+1), which
/// evaluates them without the triangular F array. The series is never declared
/// converged before the cost's horizon.
ConvergentValue potential_upward(const UpwardCoefficients& coeffs, const CostFunction& cost, State i,
                                 const SeriesPolicy& policy = {});
ConvergentValue potential_upward(const TransitionKernel& kernel, const CostFunction& cost, State i,
                                 const SeriesPolicy& policy = {});

/// G(i,j) = (1/P(j,j+1)) sum_{m>=max(i,j)} F_m^{(j)}.
ConvergentValue green_upward(const UpwardCoefficients& coeffs, State i, State j,
                             const SeriesPolicy& policy = {});
ConvergentValue green_upward(const TransitionKernel& kernel, State i, State j,
                             const SeriesPolicy& policy = {});

/// Transient iff sum_n F_n^{(0)} converges. Divergence and an exhausted index
/// cap both report Recurrent; the criterion keeps the status.
Classification classify_upward(const UpwardCoefficients& coeffs, const SeriesPolicy& policy = {});
Classification classify_upward(const TransitionKernel& kernel, const SeriesPolicy& policy = {});

} // namespace skipfree
