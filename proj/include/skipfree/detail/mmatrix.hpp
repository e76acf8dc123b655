// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace skipfree::detail {

enum class EliminationOrder {
    Ascending,   // lower-Hessenberg systems stay Hessenberg
    Descending,  // upper-Hessenberg systems stay Hessenberg
};

/// Factorization of A = D - O, where O >= 0 holds the off-diagonal weights and
/// the diagonal is D_ii = leak_i + sum_{j != i} O_ij with leak_i >= 0.
///
/// Both I - P_n (O = P_n off the diagonal, leak = mass cut off by the
/// truncation) and -Q_n fit this form. Elimination never subtracts: pivots are
/// rebuilt from leaks and remaining off-diagonals, so every component of the
/// solution keeps small relative error even when the solution spans many
/// orders of magnitude. Zero entries are skipped, which keeps Hessenberg
/// factorizations at O(n^2) work when the order matches the band.
class SubtractionFreeFactor {
public:
    SubtractionFreeFactor(std::size_t size, std::vector<double> offdiag, std::vector<double> leak,
                          EliminationOrder order);

    std::size_t size() const noexcept { return size_; }

    /// Solves A x = rhs for nonnegative rhs; the result is nonnegative.
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::size_t pos(std::size_t p) const noexcept {
        return order_ == EliminationOrder::Ascending ? p : size_ - 1 - p;
    }
    double& w(std::size_t p, std::size_t q) noexcept { return work_[pos(p) * size_ + pos(q)]; }
    double w(std::size_t p, std::size_t q) const noexcept { return work_[pos(p) * size_ + pos(q)]; }

    std::size_t size_;
    EliminationOrder order_;
    std::vector<double> work_;   // multipliers below, reduced off-diagonals above (permuted order)
    std::vector<double> pivot_;  // by elimination position
};

/// Dense LU with partial pivoting (Eigen) of the same A = D - O. Tiny
/// negative solution components (>= -1e-12 relative to the largest) are
/// clamped to zero. Throws SingularTruncation when the reciprocal condition
/// estimate falls below 1e-14.
class PivotedLuFactor {
public:
    PivotedLuFactor(std::size_t size, const std::vector<double>& offdiag, const std::vector<double>& leak);

    std::size_t size() const noexcept { return size_; }
    std::vector<double> solve(std::span<const double> rhs) const;

    /// Number of entries clamped by the most recent solve.
    std::size_t last_clamped() const noexcept { return clamped_; }

private:
    struct Impl;
    std::size_t size_;
    std::shared_ptr<const Impl> impl_;
    mutable std::size_t clamped_ = 0;
};

} // namespace skipfree::detail
