// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skipfree/types.hpp"

namespace skipfree {

/// Row-wise access to a (possibly infinite) matrix on {0, 1, 2, ...}.
///
/// Implementations are immutable after construction and safe to share between
/// threads.
class RowMatrix {
public:
    virtual ~RowMatrix() = default;

    virtual StateSpace state_space() const = 0;
    virtual Structure structure() const = 0;

    /// Replaces `out` with the entries of row i whose column is <= max_col, in
    /// ascending column order. Rows with infinite support throw CapabilityError
    /// when max_col is kNoLimit.
    virtual void row(State i, State max_col, std::vector<Entry>& out) const = 0;

    /// True when every row has finite support.
    virtual bool finite_rows() const { return true; }

    /// Sum of row i over columns >= k (k > i) when known in closed form.
    virtual std::optional<double> analytic_tail(State i, State k) const;

    virtual std::string describe() const = 0;

    /// Single entry (i, j), by scanning row i.
    double entry(State i, State j) const;
};

/// Stochastic matrix P of a discrete-time chain.
class TransitionKernel : public RowMatrix {};

/// Conservative, totally stable Q-matrix of a continuous-time chain.
class GeneratorKernel : public RowMatrix {
public:
    double diagonal(State i) const { return entry(i, i); }
};

/// P_n^{(k-)} = sum_{j<=k} P(n, j), 0 <= k < n, summed directly over the row.
double prefix_sum(const TransitionKernel& kernel, State n, State k);

/// P_m^{(k+)} = sum_{j>=k} P(m, j), k > m. Uses the analytic oracle when the
/// kernel has one; otherwise sums the row directly (finite rows only).
double tail_sum(const TransitionKernel& kernel, State m, State k);

/// Q_n^{(k-)} and Q_m^{(k+)} for generators, same contracts.
double prefix_sum(const GeneratorKernel& gen, State n, State k);
double tail_sum(const GeneratorKernel& gen, State m, State k);

struct Violation {
    State row = 0;
    std::string kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Checks rows 0..i_max of a kernel: probability bounds, unit row sums (1e-12),
/// consistency with the structure tag, and tail-oracle consistency.
ValidationReport validate_kernel(const TransitionKernel& kernel, State i_max);

/// Same for a generator: nonnegative off-diagonals, negative diagonal,
/// zero row sums, structure tag.
ValidationReport validate_generator(const GeneratorKernel& gen, State i_max);

/// Skip-free pattern of a dense square matrix (off-diagonal nonzeros only).
Structure detect_structure(const std::vector<std::vector<double>>& dense);

/// Kernel on a finite state space backed by a dense matrix.
class FiniteKernel final : public TransitionKernel {
public:
    /// Does not validate; structure is detected when not given.
    explicit FiniteKernel(std::vector<std::vector<double>> dense,
                          std::optional<Structure> structure = std::nullopt);

    StateSpace state_space() const override { return StateSpace::finite(dense_.size()); }
    Structure structure() const override { return structure_; }
    void row(State i, State max_col, std::vector<Entry>& out) const override;
    std::string describe() const override;

    const std::vector<std::vector<double>>& dense() const noexcept { return dense_; }

private:
    std::vector<std::vector<double>> dense_;
    Structure structure_;
};

/// Generator on a finite state space backed by a dense matrix.
class FiniteGenerator final : public GeneratorKernel {
public:
    explicit FiniteGenerator(std::vector<std::vector<double>> dense,
                             std::optional<Structure> structure = std::nullopt);

    StateSpace state_space() const override { return StateSpace::finite(dense_.size()); }
    Structure structure() const override { return structure_; }
    void row(State i, State max_col, std::vector<Entry>& out) const override;
    std::string describe() const override;

    const std::vector<std::vector<double>>& dense() const noexcept { return dense_; }

private:
    std::vector<std::vector<double>> dense_;
    Structure structure_;
};

} // namespace skipfree
