// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "skipfree/kernel.hpp"

namespace skipfree {

/// Inputs of the upward recursion: the up-step weight P(n,n+1) and the lower
/// prefix sums P_n^{(k-)}. Backed by P for discrete time and by Q for
/// continuous time (where the prefix sums only involve off-diagonal rates).
class UpwardCoefficients {
public:
    virtual ~UpwardCoefficients() = default;

    /// Fills prefixes[k] = sum_{j<=k} M(n, j) for k = 0..n-1 and returns M(n, n+1).
    virtual double load_row(State n, std::vector<double>& prefixes) const = 0;
};

/// Inputs of the downward recursion: the down-step weight M(m,m-1) and the
/// upper tail sums M_m^{(k+)}.
class DownwardCoefficients {
public:
    virtual ~DownwardCoefficients() = default;

    /// M(m, m-1) for m >= 1.
    virtual double down(State m) const = 0;

    /// Fills tails[l] = M_m^{((m+1+l)+)} for columns m+1..k_max. The vector may
    /// stop early; returns true when every omitted tail beyond its end is zero.
    virtual bool load_tails(State m, State k_max, std::vector<double>& tails) const = 0;
};

/// Adapter over a kernel or generator. Checks the skip-free tag on construction.
class RowMatrixUpward final : public UpwardCoefficients {
public:
    explicit RowMatrixUpward(const RowMatrix& m);
    double load_row(State n, std::vector<double>& prefixes) const override;

private:
    const RowMatrix& m_;
    mutable std::vector<Entry> scratch_;
};

class RowMatrixDownward final : public DownwardCoefficients {
public:
    explicit RowMatrixDownward(const RowMatrix& m);
    double down(State m) const override;
    bool load_tails(State m, State k_max, std::vector<double>& tails) const override;

private:
    const RowMatrix& m_;
    bool oracle_;
    mutable std::vector<Entry> scratch_;
};

} // namespace skipfree
