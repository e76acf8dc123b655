// SPDX-License-Identifier: Apache-2.0
#include "skipfree/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "skipfree/detail/parallel.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/format.hpp"
#include "skipfree/series.hpp"

namespace skipfree {

namespace {

detail::EliminationOrder order_for(Structure s) {
    // Upper-Hessenberg (downward-only) systems eliminate from the far corner.
    return s == Structure::DownwardSkipFree ? detail::EliminationOrder::Descending
                                            : detail::EliminationOrder::Ascending;
}

void check_level(const RowMatrix& m, std::size_t n) {
    const StateSpace ss = m.state_space();
    if (ss.is_finite() && n >= *ss.n_states) {
        throw DomainError("truncation level " + std::to_string(n) + " exceeds the " +
                          std::to_string(*ss.n_states) + "-state space");
    }
}

// Mass of row i beyond column n: oracle, direct tail, or complement as last resort.
double cut_mass(const RowMatrix& m, State i, std::size_t n, double kept, std::vector<Entry>& scratch) {
    if (auto t = m.analytic_tail(i, n + 1)) return std::max(0.0, *t);
    if (m.finite_rows()) {
        m.row(i, kNoLimit, scratch);
        NeumaierSum s;
        for (const Entry& e : scratch) {
            if (e.col > n) s.add(e.value);
        }
        return s.get();
    }
    return std::max(0.0, 1.0 - kept);
}

} // namespace

TruncatedChain TruncatedChain::from_dense(const std::vector<std::vector<double>>& rows,
                                          Structure structure) {
    if (rows.empty()) throw FormatError("truncated chain needs at least one state");
    const std::size_t size = rows.size();
    TruncatedChain tc;
    tc.n = size - 1;
    tc.matrix.assign(size * size, 0.0);
    tc.leak.assign(size, 0.0);
    tc.source_structure = structure;
    for (std::size_t i = 0; i < size; ++i) {
        if (rows[i].size() != size) throw FormatError("truncated chain matrix is not square");
        NeumaierSum s;
        for (std::size_t j = 0; j < size; ++j) {
            const double v = rows[i][j];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw DomainError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") is not a probability");
            }
            tc.matrix[i * size + j] = v;
            s.add(v);
        }
        if (s.get() > 1.0 + 1e-12) {
            throw DomainError("row " + std::to_string(i) + " of the truncated chain sums above 1");
        }
        tc.leak[i] = std::max(0.0, 1.0 - s.get());
    }
    return tc;
}

TruncatedChain northwest_truncate(const TransitionKernel& kernel, std::size_t n) {
    check_level(kernel, n);
    const std::size_t size = n + 1;
    TruncatedChain tc;
    tc.n = n;
    tc.matrix.assign(size * size, 0.0);
    tc.leak.assign(size, 0.0);
    tc.source_structure = kernel.structure();
    std::vector<Entry> r;
    std::vector<Entry> scratch;
    for (State i = 0; i <= n; ++i) {
        kernel.row(i, n, r);
        NeumaierSum kept;
        for (const Entry& e : r) {
            tc.matrix[i * size + e.col] = e.value;
            kept.add(e.value);
        }
        tc.leak[i] = cut_mass(kernel, i, n, kept.get(), scratch);
    }
    return tc;
}

Truncation northwest_truncate(const TransitionKernel& kernel, const CostFunction& cost, std::size_t n) {
    return Truncation{northwest_truncate(kernel, n), cost.head(n + 1)};
}

TruncatedSystem::TruncatedSystem(const TruncatedChain& tc, SolverKind kind)
    : TruncatedSystem(tc.size(), tc.matrix, tc.leak, tc.source_structure, kind) {}

namespace {

std::variant<detail::SubtractionFreeFactor, detail::PivotedLuFactor>
make_factor(std::size_t size, std::vector<double> offdiag, std::vector<double> leak, Structure s,
            SolverKind kind) {
    for (std::size_t i = 0; i < size; ++i) offdiag[i * size + i] = 0.0;
    switch (kind) {
    case SolverKind::PivotedLu:
        return detail::PivotedLuFactor(size, offdiag, leak);
    case SolverKind::SubtractionFree:
        return detail::SubtractionFreeFactor(size, std::move(offdiag), std::move(leak),
                                             detail::EliminationOrder::Ascending);
    case SolverKind::Auto:
    case SolverKind::Structured:
        break;
    }
    return detail::SubtractionFreeFactor(size, std::move(offdiag), std::move(leak), order_for(s));
}

} // namespace

TruncatedSystem::TruncatedSystem(std::size_t size, std::vector<double> offdiag, std::vector<double> leak,
                                 Structure structure, SolverKind kind)
    : size_(size), factor_(make_factor(size, std::move(offdiag), std::move(leak), structure, kind)) {}

std::vector<double> TruncatedSystem::solve(std::span<const double> rhs) const {
    return std::visit([&](const auto& f) { return f.solve(rhs); }, factor_);
}

double truncated_residual(const TruncatedChain& tc, std::span<const double> phi,
                          std::span<const double> cost) {
    const std::size_t size = tc.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        NeumaierSum s(phi[i] - cost[i]);
        for (std::size_t j = 0; j < size; ++j) {
            const double p = tc.matrix[i * size + j];
            if (p != 0.0) s.add(-p * phi[j]);
        }
        worst = std::max(worst, std::fabs(s.get()));
    }
    return worst;
}

TruncatedSolution solve_truncated_potential(const TruncatedChain& tc, std::span<const double> cost,
                                            SolverKind kind) {
    if (cost.size() != tc.size()) throw DomainError("cost vector length differs from truncation size");
    for (double c : cost) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("cost must be finite and nonnegative");
    }
    TruncatedSolution sol;
    sol.n = tc.n;
    if (std::all_of(cost.begin(), cost.end(), [](double c) { return c == 0.0; })) {
        sol.phi.assign(tc.size(), 0.0);
        return sol;
    }
    TruncatedSystem sys(tc, kind);
    sol.phi = sys.solve(cost);
    sol.residual = truncated_residual(tc, sol.phi, cost);
    return sol;
}

std::vector<double> truncated_green(const TruncatedChain& tc, std::size_t j, SolverKind kind) {
    if (j > tc.n) throw DomainError("Green column " + std::to_string(j) + " beyond truncation level");
    std::vector<double> e(tc.size(), 0.0);
    e[j] = 1.0;
    return TruncatedSystem(tc, kind).solve(e);
}

bool SweepResult::nondecreasing(double slack) const {
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] < values[k - 1] - slack * (1.0 + std::fabs(values[k]))) return false;
    }
    return true;
}

std::vector<std::size_t> default_levels() { return {25, 50, 100, 200, 400, 800}; }

ConvergentValue sweep_verdict(std::span<const double> values, double tol, double cap, bool zero_forcing) {
    ConvergentValue out;
    if (values.empty()) {
        out.status = Status::IndexCapReached;
        return out;
    }
    if (zero_forcing) {
        out.value = 0.0;
        out.terms_used = 1;
        return out;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        out.terms_used = k + 1;
        if (!std::isfinite(v) || v > cap) {
            out.value = std::numeric_limits<double>::infinity();
            out.status = Status::Diverged;
            out.last_increment = k > 0 ? v - values[k - 1] : v;
            return out;
        }
        out.value = v;
        out.last_increment = k > 0 ? v - values[k - 1] : v;
        if (k > 0 && std::fabs(out.last_increment) <= tol * std::fabs(v)) {
            out.status = Status::Converged;
            return out;
        }
    }
    out.status = Status::IndexCapReached;
    return out;
}

namespace {

void check_levels(std::span<const std::size_t> levels, State i) {
    if (levels.empty()) throw DomainError("sweep needs at least one level");
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (levels[k] <= levels[k - 1]) throw DomainError("sweep levels must be strictly increasing");
    }
    if (i > levels.front()) throw DomainError("state exceeds the smallest truncation level");
}

} // namespace

std::vector<SweepResult> potential_sweep(const TransitionKernel& kernel, const CostFunction& cost,
                                         std::span<const State> states,
                                         std::span<const std::size_t> levels,
                                         const SweepOptions& options) {
    State top = 0;
    for (State s : states) top = std::max(top, s);
    check_levels(levels, top);
    std::vector<std::vector<double>> phi(levels.size());
    const bool zero = cost.is_zero();
    detail::parallel_for(levels.size(), options.threads, [&](std::size_t k) {
        // Once a lower level diverged the higher ones are still computed; they
        // are monotone, so they exceed the cap as well.
        Truncation t = northwest_truncate(kernel, cost, levels[k]);
        phi[k] = solve_truncated_potential(t.chain, t.cost, options.solver).phi;
    });
    std::vector<SweepResult> out(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        SweepResult& r = out[s];
        r.levels.assign(levels.begin(), levels.end());
        for (std::size_t k = 0; k < levels.size(); ++k) r.values.push_back(phi[k][states[s]]);
        r.verdict = sweep_verdict(r.values, options.tol, options.divergence_cap, zero);
    }
    return out;
}

SweepResult potential_sweep(const TransitionKernel& kernel, const CostFunction& cost, State i,
                            std::span<const std::size_t> levels, const SweepOptions& options) {
    const State states[] = {i};
    return std::move(potential_sweep(kernel, cost, states, levels, options).front());
}

SweepResult green_sweep(const TransitionKernel& kernel, State i, State j,
                        std::span<const std::size_t> levels, const SweepOptions& options) {
    check_levels(levels, std::max(i, j));
    SweepResult r;
    r.levels.assign(levels.begin(), levels.end());
    r.values.assign(levels.size(), 0.0);
    detail::parallel_for(levels.size(), options.threads, [&](std::size_t k) {
        const TruncatedChain tc = northwest_truncate(kernel, levels[k]);
        r.values[k] = truncated_green(tc, j, options.solver)[i];
    });
    r.verdict = sweep_verdict(r.values, options.tol, options.divergence_cap, false);
    return r;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    os << "n,value,increment\n";
    for (std::size_t k = 0; k < sweep.levels.size(); ++k) {
        const double inc = k > 0 ? sweep.values[k] - sweep.values[k - 1] : sweep.values[k];
        os << sweep.levels[k] << ',' << format_double(sweep.values[k]) << ',' << format_double(inc)
           << '\n';
    }
}

} // namespace skipfree
