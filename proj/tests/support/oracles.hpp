// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "skipfree/cost.hpp"
#include "skipfree/kernel.hpp"
#include "skipfree/series.hpp"

namespace skipfree::testing {

// Recursions evaluated straight from the lemma definitions, with prefix and
// tail masses taken from dense rows (tails as row complements), independent
// of the library's coefficient sources.

inline double dense_prefix(const RowMatrix& m, State n, State k) {
    std::vector<Entry> r;
    m.row(n, k, r);
    NeumaierSum s;
    for (const Entry& e : r) s.add(e.value);
    return s.get();
}

inline double dense_tail(const RowMatrix& m, State n, State k) { return 1.0 - dense_prefix(m, n, k - 1); }

/// f(i) = c(i)/P(i,i+1), f(n) = (sum_{k=i..n-1} P_n^{(k-)} f(k) + c(n)) / P(n,n+1).
inline std::vector<double> recursive_f(const TransitionKernel& k, const CostFunction& c, State i, State n) {
    std::vector<double> f(n - i + 1);
    for (State m = i; m <= n; ++m) {
        NeumaierSum s(c(m));
        for (State j = i; j < m; ++j) s.add(dense_prefix(k, m, j) * f[j - i]);
        f[m - i] = s.get() / k.entry(m, m + 1);
    }
    return f;
}

/// h(n+1) = 0, h(i) = (sum_{k=i+1..n} P_i^{(k+)} h(k) + c(i)) / P(i,i-1), 1 <= i <= n.
inline std::vector<double> backward_h(const TransitionKernel& k, const CostFunction& c, State n) {
    std::vector<double> h(n + 2, 0.0);
    for (State i = n; i >= 1; --i) {
        NeumaierSum s(c(i));
        for (State j = i + 1; j <= n; ++j) s.add(dense_tail(k, i, j) * h[j]);
        h[i] = s.get() / k.entry(i, i - 1);
    }
    return h;
}

} // namespace skipfree::testing
