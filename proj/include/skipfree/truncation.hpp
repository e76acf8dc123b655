// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "skipfree/cost.hpp"
#include "skipfree/detail/mmatrix.hpp"
#include "skipfree/kernel.hpp"
#include "skipfree/types.hpp"

namespace skipfree {

/// Dense (n+1)x(n+1) northwest corner of a kernel on states 0..n.
///
/// `leak[i]` is the probability mass row i loses to states beyond n (plus any
/// deficit of the parent row), kept separately so the solver never forms
/// 1 - rowsum.
struct TruncatedChain {
    std::size_t n = 0;
    std::vector<double> matrix;  // row-major
    std::vector<double> leak;
    Structure source_structure = Structure::General;

    std::size_t size() const noexcept { return n + 1; }
    double at(std::size_t i, std::size_t j) const { return matrix[i * size() + j]; }

    /// Builds a truncated chain directly from a square substochastic matrix;
    /// the leak of each row is 1 - rowsum (clamped at 0).
    static TruncatedChain from_dense(const std::vector<std::vector<double>>& rows,
                                     Structure structure = Structure::General);
};

struct Truncation {
    TruncatedChain chain;
    std::vector<double> cost;  // c(0..n)
};

/// Restricts rows and columns of the kernel to 0..n.
TruncatedChain northwest_truncate(const TransitionKernel& kernel, std::size_t n);
Truncation northwest_truncate(const TransitionKernel& kernel, const CostFunction& cost, std::size_t n);

enum class SolverKind {
    Auto,             // Structured for skip-free tags, SubtractionFree otherwise
    Structured,       // subtraction-free elimination ordered along the Hessenberg band
    SubtractionFree,  // subtraction-free elimination in natural order
    PivotedLu,        // dense LU with partial pivoting
};

/// Factorized I - P_n, reusable across right-hand sides.
class TruncatedSystem {
public:
    explicit TruncatedSystem(const TruncatedChain& tc, SolverKind kind = SolverKind::Auto);
    /// Factorizes D - O directly (used for -Q_n in continuous time).
    TruncatedSystem(std::size_t size, std::vector<double> offdiag, std::vector<double> leak,
                    Structure structure, SolverKind kind = SolverKind::Auto);

    std::size_t size() const noexcept { return size_; }
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::size_t size_;
    std::variant<detail::SubtractionFreeFactor, detail::PivotedLuFactor> factor_;
};

struct TruncatedSolution {
    std::size_t n = 0;
    std::vector<double> phi;
    double residual = 0.0;  // max |(I - P_n) phi - c|
};

/// Solves (I - P_n) phi = c_n.
TruncatedSolution solve_truncated_potential(const TruncatedChain& tc, std::span<const double> cost,
                                            SolverKind kind = SolverKind::Auto);

/// Column j of the truncated Green matrix: solves (I - P_n) g = e_j.
std::vector<double> truncated_green(const TruncatedChain& tc, std::size_t j,
                                    SolverKind kind = SolverKind::Auto);

/// max_i |phi(i) - sum_j P_n(i,j) phi(j) - c(i)|.
double truncated_residual(const TruncatedChain& tc, std::span<const double> phi,
                          std::span<const double> cost);

/// Levels n and the quantity computed at each, with the convergence verdict.
struct SweepResult {
    std::vector<std::size_t> levels;
    std::vector<double> values;
    ConvergentValue verdict;

    /// True when values never decrease by more than slack * (1 + value).
    bool nondecreasing(double slack = 1e-12) const;
};

struct SweepOptions {
    double tol = 1e-9;              // relative difference of consecutive levels
    double divergence_cap = 1e12;
    SolverKind solver = SolverKind::Auto;
    unsigned threads = 0;           // 0: SKIPFREE_THREADS or hardware
};

/// Default schedule 25, 50, 100, 200, 400, 800.
std::vector<std::size_t> default_levels();

/// Truncated potentials n -> phi_n(i) at each level (levels strictly increasing,
/// i <= min level). Converged when consecutive levels agree within tol
/// relatively; Diverged once a value exceeds the cap. The stopping rule is a
/// heuristic: truncation error bounds are not available in general.
SweepResult potential_sweep(const TransitionKernel& kernel, const CostFunction& cost, State i,
                            std::span<const std::size_t> levels, const SweepOptions& options = {});

/// Same sweep for several states at once (one solve per level).
std::vector<SweepResult> potential_sweep(const TransitionKernel& kernel, const CostFunction& cost,
                                         std::span<const State> states,
                                         std::span<const std::size_t> levels,
                                         const SweepOptions& options = {});

/// Truncated Green entries n -> G_n(i, j).
SweepResult green_sweep(const TransitionKernel& kernel, State i, State j,
                        std::span<const std::size_t> levels, const SweepOptions& options = {});

/// Builds the verdict for a sequence of level values.
ConvergentValue sweep_verdict(std::span<const double> values, double tol, double cap,
                              bool zero_forcing);

/// CSV with columns n,value,increment.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

} // namespace skipfree
