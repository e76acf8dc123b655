// SPDX-License-Identifier: Apache-2.0
#include "skipfree/kernel.hpp"

#include <cmath>
#include <sstream>

#include "skipfree/errors.hpp"
#include "skipfree/series.hpp"

namespace skipfree {

std::string_view to_string(Structure s) noexcept {
    switch (s) {
    case Structure::General: return "general";
    case Structure::UpwardSkipFree: return "upward-skip-free";
    case Structure::DownwardSkipFree: return "downward-skip-free";
    case Structure::BirthDeath: return "birth-death";
    }
    return "?";
}

std::string_view to_string(Status s) noexcept {
    switch (s) {
    case Status::Converged: return "Converged";
    case Status::Diverged: return "Diverged";
    case Status::IndexCapReached: return "IndexCapReached";
    case Status::Oscillating: return "Oscillating";
    }
    return "?";
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Transient: return "Transient";
    case Verdict::Recurrent: return "Recurrent";
    case Verdict::Unknown: return "Unknown";
    }
    return "?";
}

std::optional<double> RowMatrix::analytic_tail(State, State) const { return std::nullopt; }

double RowMatrix::entry(State i, State j) const {
    std::vector<Entry> r;
    row(i, j, r);
    for (const Entry& e : r) {
        if (e.col == j) return e.value;
    }
    return 0.0;
}

namespace {

double direct_prefix(const RowMatrix& m, State n, State k) {
    if (k >= n) {
        throw DomainError("prefix sum needs k < n (got n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
    }
    std::vector<Entry> r;
    m.row(n, k, r);
    NeumaierSum s;
    for (const Entry& e : r) s.add(e.value);
    return s.get();
}

double direct_tail(const RowMatrix& m, State row, State k) {
    if (k <= row) {
        throw DomainError("tail sum needs k > m (got m=" + std::to_string(row) +
                          ", k=" + std::to_string(k) + ")");
    }
    if (auto t = m.analytic_tail(row, k)) return *t;
    if (!m.finite_rows()) {
        throw CapabilityError("row " + std::to_string(row) +
                              " has infinite support and no tail-sum oracle");
    }
    std::vector<Entry> r;
    m.row(row, kNoLimit, r);
    NeumaierSum s;
    for (const Entry& e : r) {
        if (e.col >= k) s.add(e.value);
    }
    return s.get();
}

constexpr State kValidationWidth = 64;
constexpr double kRowSumTol = 1e-12;

std::string fmt_value(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

void check_structure(const RowMatrix& m, State i, const std::vector<Entry>& r,
                     ValidationReport& report) {
    const Structure s = m.structure();
    bool skip_up = false;
    bool skip_down = false;
    double up = 0.0;
    double down = 0.0;
    for (const Entry& e : r) {
        if (e.value == 0.0) continue;
        if (is_upward(s) && e.col >= i + 2) skip_up = true;
        if (is_downward(s) && e.col + 2 <= i) skip_down = true;
        if (e.col == i + 1) up = e.value;
        if (i >= 1 && e.col == i - 1) down = e.value;
    }
    if (skip_up) {
        report.violations.push_back({i, "skip-above", "skip above at row " + std::to_string(i)});
    }
    if (skip_down) {
        report.violations.push_back({i, "skip-below", "skip below at row " + std::to_string(i)});
    }
    if (is_upward(s) && m.state_space().contains(i + 1) && !(up > 0.0)) {
        report.violations.push_back(
            {i, "no-up-step", "P(i,i+1) = 0 at row " + std::to_string(i)});
    }
    if (is_downward(s) && i >= 1 && !(down > 0.0)) {
        report.violations.push_back(
            {i, "no-down-step", "P(i,i-1) = 0 at row " + std::to_string(i)});
    }
}

// Row sum and tail consistency. Infinite rows combine an enumerated prefix with
// the oracle tail.
template <class Report>
double row_total(const RowMatrix& m, State i, std::vector<Entry>& r, Report&& report) {
    NeumaierSum sum;
    if (m.finite_rows()) {
        m.row(i, kNoLimit, r);
        for (const Entry& e : r) sum.add(e.value);
        return sum.get();
    }
    const State width_end = i + kValidationWidth;
    m.row(i, width_end, r);
    for (const Entry& e : r) sum.add(e.value);
    auto tail = m.analytic_tail(i, width_end + 1);
    if (!tail) {
        report(Violation{i, "no-tail-oracle",
                         "row " + std::to_string(i) + " has infinite support and no tail oracle"});
        return sum.get();
    }
    sum.add(*tail);
    for (State k = i + 1; k <= width_end; ++k) {
        auto tk = m.analytic_tail(i, k);
        auto tk1 = m.analytic_tail(i, k + 1);
        double pk = 0.0;
        for (const Entry& e : r) {
            if (e.col == k) pk = e.value;
        }
        if (tk && tk1 && std::fabs((*tk - *tk1) - pk) > kRowSumTol) {
            report(Violation{i, "tail-inconsistent",
                             "tail sums inconsistent at row " + std::to_string(i) + ", column " +
                                 std::to_string(k)});
            break;
        }
    }
    return sum.get();
}

} // namespace

double prefix_sum(const TransitionKernel& kernel, State n, State k) { return direct_prefix(kernel, n, k); }
double tail_sum(const TransitionKernel& kernel, State m, State k) { return direct_tail(kernel, m, k); }
double prefix_sum(const GeneratorKernel& gen, State n, State k) { return direct_prefix(gen, n, k); }
double tail_sum(const GeneratorKernel& gen, State m, State k) { return direct_tail(gen, m, k); }

ValidationReport validate_kernel(const TransitionKernel& kernel, State i_max) {
    ValidationReport report;
    std::vector<Entry> r;
    const StateSpace space = kernel.state_space();
    for (State i = 0; i <= i_max && space.contains(i); ++i) {
        const double total = row_total(kernel, i, r, [&](Violation v) {
            report.violations.push_back(std::move(v));
        });
        for (const Entry& e : r) {
            if (!(e.value >= 0.0 && e.value <= 1.0)) {
                report.violations.push_back({i, "probability-bounds",
                                             "P(" + std::to_string(i) + "," + std::to_string(e.col) +
                                                 ") = " + fmt_value(e.value) + " outside [0,1]"});
            }
        }
        if (!(std::fabs(total - 1.0) <= kRowSumTol)) {
            report.violations.push_back({i, "row-sum",
                                         "row sum " + fmt_value(total) + " ≠ 1 at row " +
                                             std::to_string(i)});
        }
        check_structure(kernel, i, r, report);
    }
    return report;
}

ValidationReport validate_generator(const GeneratorKernel& gen, State i_max) {
    ValidationReport report;
    std::vector<Entry> r;
    const StateSpace space = gen.state_space();
    for (State i = 0; i <= i_max && space.contains(i); ++i) {
        const double total = row_total(gen, i, r, [&](Violation v) {
            report.violations.push_back(std::move(v));
        });
        double diag = 0.0;
        double off = 0.0;
        for (const Entry& e : r) {
            if (e.col == i) {
                diag = e.value;
            } else {
                off += std::fabs(e.value);
                if (!(e.value >= 0.0) || !std::isfinite(e.value)) {
                    report.violations.push_back(
                        {i, "negative-rate",
                         "Q(" + std::to_string(i) + "," + std::to_string(e.col) + ") = " +
                             fmt_value(e.value) + " is not a nonnegative rate"});
                }
            }
        }
        if (!(diag < 0.0) || !std::isfinite(diag)) {
            report.violations.push_back(
                {i, "not-totally-stable",
                 "Q(i,i) = " + fmt_value(diag) + " is not finite negative at row " + std::to_string(i)});
        }
        const double scale = std::max(1.0, std::fabs(diag) + off);
        if (!(std::fabs(total) <= kRowSumTol * scale)) {
            report.violations.push_back({i, "row-sum",
                                         "row sum " + fmt_value(total) + " ≠ 0 at row " +
                                             std::to_string(i)});
        }
        check_structure(gen, i, r, report);
    }
    return report;
}

Structure detect_structure(const std::vector<std::vector<double>>& dense) {
    const std::size_t n = dense.size();
    bool upward = n >= 2;
    bool downward = n >= 2;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dense[i].size(); ++j) {
            if (dense[i][j] == 0.0 || i == j) continue;
            if (j >= i + 2) upward = false;
            if (j + 2 <= i) downward = false;
        }
        if (i + 1 < n && !(dense[i][i + 1] > 0.0)) upward = false;
        if (i >= 1 && !(dense[i][i - 1] > 0.0)) downward = false;
    }
    return combine(upward, downward);
}

namespace {

void dense_row(const std::vector<std::vector<double>>& dense, State i, State max_col,
               std::vector<Entry>& out) {
    if (i >= dense.size()) {
        throw DomainError("row " + std::to_string(i) + " outside finite state space of size " +
                          std::to_string(dense.size()));
    }
    out.clear();
    const auto& r = dense[i];
    const std::size_t end = max_col == kNoLimit ? r.size() : std::min(r.size(), max_col + 1);
    for (std::size_t j = 0; j < end; ++j) {
        if (r[j] != 0.0) out.push_back({j, r[j]});
    }
}

void require_square(const std::vector<std::vector<double>>& dense) {
    for (const auto& r : dense) {
        if (r.size() != dense.size()) throw FormatError("matrix is not square");
    }
}

} // namespace

FiniteKernel::FiniteKernel(std::vector<std::vector<double>> dense, std::optional<Structure> structure)
    : dense_(std::move(dense)) {
    require_square(dense_);
    structure_ = structure ? *structure : detect_structure(dense_);
}

void FiniteKernel::row(State i, State max_col, std::vector<Entry>& out) const {
    dense_row(dense_, i, max_col, out);
}

std::string FiniteKernel::describe() const {
    return "finite kernel (" + std::to_string(dense_.size()) + " states, " +
           std::string(to_string(structure_)) + ")";
}

FiniteGenerator::FiniteGenerator(std::vector<std::vector<double>> dense,
                                 std::optional<Structure> structure)
    : dense_(std::move(dense)) {
    require_square(dense_);
    structure_ = structure ? *structure : detect_structure(dense_);
}

void FiniteGenerator::row(State i, State max_col, std::vector<Entry>& out) const {
    dense_row(dense_, i, max_col, out);
}

std::string FiniteGenerator::describe() const {
    return "finite generator (" + std::to_string(dense_.size()) + " states, " +
           std::string(to_string(structure_)) + ")";
}

} // namespace skipfree
