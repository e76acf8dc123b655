// SPDX-License-Identifier: Apache-2.0
#include "skipfree/coefficients.hpp"

#include <algorithm>

#include "skipfree/errors.hpp"

namespace skipfree {

RowMatrixUpward::RowMatrixUpward(const RowMatrix& m) : m_(m) {
    if (!is_upward(m.structure())) {
        throw StructureViolation("upward recursion needs an upward skip-free chain, got " +
                                 std::string(to_string(m.structure())));
    }
}

double RowMatrixUpward::load_row(State n, std::vector<double>& prefixes) const {
    m_.row(n, n + 1, scratch_);
    prefixes.assign(n, 0.0);
    double up = 0.0;
    // Entries are ascending; accumulate the running prefix over columns < n.
    double running = 0.0;
    State next = 0;
    for (const Entry& e : scratch_) {
        if (e.col == n + 1) {
            up = e.value;
            continue;
        }
        if (e.col >= n) continue;
        for (; next < e.col; ++next) prefixes[next] = running;
        running += e.value;
    }
    for (; next < n; ++next) prefixes[next] = running;
    if (!(up > 0.0)) {
        throw StructureViolation("up-step weight at state " + std::to_string(n) + " is zero");
    }
    return up;
}

RowMatrixDownward::RowMatrixDownward(const RowMatrix& m)
    : m_(m), oracle_(m.analytic_tail(0, 1).has_value()) {
    if (!is_downward(m.structure())) {
        throw StructureViolation("downward recursion needs a downward skip-free chain, got " +
                                 std::string(to_string(m.structure())));
    }
    if (!oracle_ && !m.finite_rows()) {
        throw CapabilityError("downward recursion over infinite rows needs a tail-sum oracle");
    }
}

double RowMatrixDownward::down(State m) const {
    const double d = m_.entry(m, m - 1);
    if (!(d > 0.0)) {
        throw StructureViolation("down-step weight at state " + std::to_string(m) + " is zero");
    }
    return d;
}

bool RowMatrixDownward::load_tails(State m, State k_max, std::vector<double>& tails) const {
    tails.clear();
    if (k_max <= m) return false;
    if (oracle_) {
        tails.reserve(k_max - m);
        for (State k = m + 1; k <= k_max; ++k) {
            const double t = *m_.analytic_tail(m, k);
            if (t == 0.0) return true;  // tails are nonincreasing in k
            tails.push_back(t);
        }
        return false;
    }
    m_.row(m, kNoLimit, scratch_);
    State last = m;
    for (const Entry& e : scratch_) {
        if (e.col > m && e.value != 0.0) last = std::max(last, e.col);
    }
    // Suffix sums over columns > m, accumulated from the far end (no cancellation).
    std::vector<double> mass(last - m, 0.0);
    for (const Entry& e : scratch_) {
        if (e.col > m && e.col <= last) mass[e.col - m - 1] += e.value;
    }
    for (std::size_t l = mass.size(); l-- > 1;) mass[l - 1] += mass[l];
    mass.resize(std::min<std::size_t>(mass.size(), k_max - m));
    tails = std::move(mass);
    return true;
}

} // namespace skipfree
