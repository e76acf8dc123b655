// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "skipfree/coefficients.hpp"
#include "skipfree/cost.hpp"
#include "skipfree/kernel.hpp"
#include "skipfree/series.hpp"
#include "skipfree/types.hpp"

namespace skipfree {

/// H_m^{(i)} for m = 1..i, from H_i^{(i)} = 1 and
/// H_m^{(i)} = (1/P(m,m-1)) sum_{k=m+1..i} P_m^{(k+)} H_k^{(i)}.
///
/// Entries can exceed the double range for large i, so they are stored with a
/// common power-of-two scale: H_m^{(i)} = scaled[m-1] * 2^log2_scale.
struct HTable {
    State target = 0;
    std::vector<double> scaled;
    int log2_scale = 0;

    double at(State m) const { return std::ldexp(scaled.at(m - 1), log2_scale); }
};

HTable h_table(const DownwardCoefficients& coeffs, State i);
HTable h_table(const TransitionKernel& kernel, State i);

/// sum_{k=i..n} H_i^{(k)} c(k) / P(k,k-1), from explicit H tables (1 <= i <= n).
double lemma_sum_downward(const DownwardCoefficients& coeffs, const CostFunction& cost, State i, State n);
double lemma_sum_downward(const TransitionKernel& kernel, const CostFunction& cost, State i, State n);

struct DownwardOptions {
    double tol = 1e-10;
    SeriesPolicy series{};                 // caps for the column series; tol is taken from `tol`
    std::vector<std::size_t> ratio_levels = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    double ratio_cap = 1e12;
    std::size_t column_cap = 2048;         // columns k visited by the delta and tail series
    std::function<double(State)> analytic_m;  // optional closed form for M(i)
};

/// r_n(i) = (sum_{m=i+1..n} H_m^{(n)}) / (sum_{k=1..n} P_0^{(k+)} H_k^{(n)}) on a
/// level schedule. Converged when consecutive ratios agree within tol
/// relatively; Diverged when a ratio exceeds the cap or the increments stop
/// shrinking; Oscillating when the increments keep changing sign.
struct RatioLimit {
    State i = 0;
    std::vector<std::size_t> levels;
    std::vector<double> ratios;
    ConvergentValue verdict;
};

RatioLimit m_ratio(const DownwardCoefficients& coeffs, State i, const DownwardOptions& options = {});
RatioLimit m_ratio(const TransitionKernel& kernel, State i, const DownwardOptions& options = {});
/// Several states sharing one H table per level.
std::vector<RatioLimit> m_ratios(const DownwardCoefficients& coeffs, std::span<const State> states,
                                 const DownwardOptions& options = {});

/// delta = c(0) + sum_{i>=1} P_0^{(i+)} sum_{k>=i} H_i^{(k)} c(k)/P(k,k-1),
/// summed by columns k: c(0) + sum_k c(k)/P(k,k-1) sum_{i<=k} P_0^{(i+)} H_i^{(k)}.
ConvergentValue delta(const DownwardCoefficients& coeffs, const CostFunction& cost,
                      const DownwardOptions& options = {});
ConvergentValue delta(const TransitionKernel& kernel, const CostFunction& cost,
                      const DownwardOptions& options = {});

/// phi(i) = delta M(i) - sum_{m>i} sum_{k>=m} H_m^{(k)} c(k)/P(k,k-1).
/// Both parts are grouped by column k, c(0) M(i) + sum_k c(k)/P(k,k-1) (M(i) D_k - N_k(i)),
/// and evaluated in extended precision, so each term is c(k) G(i,k) >= 0.
/// Diverged when M(i) or delta diverges. When the subtrahend exceeds
/// 0.9 delta M(i) every part is recomputed at tol/100.
ConvergentValue potential_downward(const DownwardCoefficients& coeffs, const CostFunction& cost, State i,
                                   const DownwardOptions& options = {});
ConvergentValue potential_downward(const TransitionKernel& kernel, const CostFunction& cost, State i,
                                   const DownwardOptions& options = {});
std::vector<ConvergentValue> potential_downward(const DownwardCoefficients& coeffs,
                                                const CostFunction& cost, std::span<const State> states,
                                                const DownwardOptions& options = {});

/// G(i,0) = M(i); G(i,j) = M(i) D_j / P(j,j-1) for 1 <= j <= i; for j > i the
/// sum_{k=i+1..j} H_k^{(j)} / P(j,j-1) is subtracted.
ConvergentValue green_downward(const DownwardCoefficients& coeffs, State i, State j,
                               const DownwardOptions& options = {});
ConvergentValue green_downward(const TransitionKernel& kernel, State i, State j,
                               const DownwardOptions& options = {});

/// Transient iff M(0) converges; Recurrent when it diverges; Unknown otherwise.
Classification classify_downward(const DownwardCoefficients& coeffs, const DownwardOptions& options = {});
Classification classify_downward(const TransitionKernel& kernel, const DownwardOptions& options = {});

} // namespace skipfree
