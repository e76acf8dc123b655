// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "skipfree/cost.hpp"
#include "skipfree/downward.hpp"
#include "skipfree/kernel.hpp"
#include "skipfree/series.hpp"
#include "skipfree/truncation.hpp"

namespace skipfree {

/// Northwest corner Q_n of a generator on states 0..n. `leak[i]` is the total
/// rate from i to states beyond n.
struct TruncatedGenerator {
    std::size_t n = 0;
    std::vector<double> matrix;  // row-major, diagonal included
    std::vector<double> leak;
    Structure source_structure = Structure::General;

    std::size_t size() const noexcept { return n + 1; }
    double at(std::size_t i, std::size_t j) const { return matrix[i * size() + j]; }

    /// From a square matrix with nonnegative off-diagonals and negative
    /// diagonal; leak[i] = -rowsum (clamped at 0).
    static TruncatedGenerator from_dense(const std::vector<std::vector<double>>& rows,
                                         Structure structure = Structure::General);
};

TruncatedGenerator truncate_generator(const GeneratorKernel& gen, std::size_t n);

/// Jump chain P_Q(i,j) = -Q(i,j)/Q(i,i) (j != i), P_Q(i,i) = 0, with the
/// holding-time cost c_Q(i) = -c(i)/Q(i,i). The potential of (P_Q, c_Q) equals
/// the continuous-time potential of (Q, c).
struct EmbeddedChain {
    std::shared_ptr<const TransitionKernel> kernel;
    CostFunction cost;
};

/// Throws StructureViolation for an absorbing state (Q(i,i) = 0); finite
/// generators are checked up front, infinite ones when a row is read.
EmbeddedChain embed(std::shared_ptr<const GeneratorKernel> gen, const CostFunction& cost);

/// Solves -Q_n psi = c_n directly.
TruncatedSolution ctmc_truncated_potential(const TruncatedGenerator& tq, std::span<const double> cost,
                                           SolverKind kind = SolverKind::Auto);
TruncatedSolution ctmc_truncated_potential(const GeneratorKernel& gen, const CostFunction& cost,
                                           std::size_t n, SolverKind kind = SolverKind::Auto);

/// max_i |-(Q_n psi)(i) - c(i)|.
double ctmc_residual(const TruncatedGenerator& tq, std::span<const double> psi, std::span<const double> cost);

/// n -> psi_n(i) over the given levels, same verdict rule as potential_sweep.
SweepResult ctmc_potential_sweep(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                 std::span<const std::size_t> levels, const SweepOptions& options = {});
std::vector<SweepResult> ctmc_potential_sweep(const GeneratorKernel& gen, const CostFunction& cost,
                                              std::span<const State> states,
                                              std::span<const std::size_t> levels,
                                              const SweepOptions& options = {});

/// psi(i) = sum_{m>=i} sum_{k<=m} F~_m^{(k)} c(k)/Q(k,k+1), with F~ built from
/// the off-diagonal prefix sums of Q.
ConvergentValue potential_upward_ct(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                    const SeriesPolicy& policy = {});

/// psi(i) = eta M~(i) - sum_{m>i} sum_{k>=m} H~_m^{(k)} c(k)/Q(k,k-1).
ConvergentValue potential_downward_ct(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                      const DownwardOptions& options = {});

/// eta = c(0) + sum_{i>=1} Q_0^{(i+)} sum_{k>=i} H~_i^{(k)} c(k)/Q(k,k-1).
ConvergentValue eta(const GeneratorKernel& gen, const CostFunction& cost, const DownwardOptions& options = {});

/// psi(i) = sum_{m>=i} (1/(Q(m,m+1) pi(m))) sum_{k<=m} pi(k) c(k) with
/// pi(0) = 1, pi(k) = prod_{m=1..k} Q(m-1,m)/Q(m,m-1).
ConvergentValue birth_death_potential(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                      const SeriesPolicy& policy = {});

} // namespace skipfree
