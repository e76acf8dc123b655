// SPDX-License-Identifier: Apache-2.0
#include "skipfree/ctmc.hpp"

#include <algorithm>
#include <cmath>

#include "skipfree/coefficients.hpp"
#include "skipfree/detail/parallel.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/upward.hpp"

namespace skipfree {

namespace {

double exit_rate(const GeneratorKernel& gen, State i) {
    const double q = -gen.diagonal(i);
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw StructureViolation("state " + std::to_string(i) + " is absorbing or unstable (Q(i,i) = " +
                                 std::to_string(-q) + ")");
    }
    return q;
}

class EmbeddedKernel final : public TransitionKernel {
public:
    explicit EmbeddedKernel(std::shared_ptr<const GeneratorKernel> gen) : gen_(std::move(gen)) {}

    StateSpace state_space() const override { return gen_->state_space(); }
    Structure structure() const override { return gen_->structure(); }
    bool finite_rows() const override { return gen_->finite_rows(); }

    void row(State i, State max_col, std::vector<Entry>& out) const override {
        const double q = exit_rate(*gen_, i);
        gen_->row(i, max_col, out);
        std::erase_if(out, [i](const Entry& e) { return e.col == i; });
        for (Entry& e : out) e.value /= q;
    }

    std::optional<double> analytic_tail(State i, State k) const override {
        auto t = gen_->analytic_tail(i, k);
        if (!t) return std::nullopt;
        return *t / exit_rate(*gen_, i);
    }

    std::string describe() const override { return "jump chain of " + gen_->describe(); }

private:
    std::shared_ptr<const GeneratorKernel> gen_;
};

} // namespace

TruncatedGenerator TruncatedGenerator::from_dense(const std::vector<std::vector<double>>& rows,
                                                  Structure structure) {
    if (rows.empty()) throw FormatError("truncated generator needs at least one state");
    const std::size_t size = rows.size();
    TruncatedGenerator tq;
    tq.n = size - 1;
    tq.matrix.assign(size * size, 0.0);
    tq.leak.assign(size, 0.0);
    tq.source_structure = structure;
    for (std::size_t i = 0; i < size; ++i) {
        if (rows[i].size() != size) throw FormatError("truncated generator is not square");
        NeumaierSum off;
        for (std::size_t j = 0; j < size; ++j) {
            const double v = rows[i][j];
            if (j != i && !(v >= 0.0)) throw DomainError("negative off-diagonal rate");
            if (j != i) off.add(v);
            tq.matrix[i * size + j] = v;
        }
        const double out_rate = -rows[i][i];
        if (!(out_rate >= 0.0)) throw DomainError("diagonal rate must be nonpositive");
        tq.leak[i] = std::max(0.0, out_rate - off.get());
    }
    return tq;
}

TruncatedGenerator truncate_generator(const GeneratorKernel& gen, std::size_t n) {
    const StateSpace ss = gen.state_space();
    if (ss.is_finite() && n >= *ss.n_states) {
        throw DomainError("truncation level " + std::to_string(n) + " exceeds the state space");
    }
    const std::size_t size = n + 1;
    TruncatedGenerator tq;
    tq.n = n;
    tq.matrix.assign(size * size, 0.0);
    tq.leak.assign(size, 0.0);
    tq.source_structure = gen.structure();
    std::vector<Entry> r;
    for (State i = 0; i <= n; ++i) {
        gen.row(i, n, r);
        NeumaierSum off;
        double diag = 0.0;
        for (const Entry& e : r) {
            tq.matrix[i * size + e.col] = e.value;
            if (e.col == i) {
                diag = e.value;
            } else {
                off.add(e.value);
            }
        }
        if (auto t = gen.analytic_tail(i, n + 1)) {
            tq.leak[i] = std::max(0.0, *t);
        } else if (gen.finite_rows()) {
            gen.row(i, kNoLimit, r);
            NeumaierSum cut;
            for (const Entry& e : r) {
                if (e.col > n) cut.add(e.value);
            }
            tq.leak[i] = cut.get();
        } else {
            tq.leak[i] = std::max(0.0, -diag - off.get());
        }
    }
    return tq;
}

EmbeddedChain embed(std::shared_ptr<const GeneratorKernel> gen, const CostFunction& cost) {
    if (!gen) throw DomainError("embed needs a generator");
    const StateSpace ss = gen->state_space();
    if (ss.is_finite()) {
        for (State i = 0; i < *ss.n_states; ++i) exit_rate(*gen, i);
    }
    EmbeddedChain ec;
    ec.kernel = std::make_shared<EmbeddedKernel>(gen);
    if (cost.is_zero()) {
        ec.cost = CostFunction::zero();
    } else {
        ec.cost = CostFunction::from_function(
            [gen, cost](State i) { return cost(i) / exit_rate(*gen, i); },
            "holding-time scaled " + cost.describe(), cost.horizon());
    }
    return ec;
}

double ctmc_residual(const TruncatedGenerator& tq, std::span<const double> psi, std::span<const double> cost) {
    const std::size_t size = tq.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        NeumaierSum s(-cost[i]);
        for (std::size_t j = 0; j < size; ++j) {
            const double q = tq.matrix[i * size + j];
            if (q != 0.0) s.add(-q * psi[j]);
        }
        worst = std::max(worst, std::fabs(s.get()));
    }
    return worst;
}

TruncatedSolution ctmc_truncated_potential(const TruncatedGenerator& tq, std::span<const double> cost,
                                           SolverKind kind) {
    if (cost.size() != tq.size()) throw DomainError("cost vector length differs from truncation size");
    TruncatedSolution sol;
    sol.n = tq.n;
    if (std::all_of(cost.begin(), cost.end(), [](double c) { return c == 0.0; })) {
        sol.phi.assign(tq.size(), 0.0);
        return sol;
    }
    TruncatedSystem sys(tq.size(), tq.matrix, tq.leak, tq.source_structure, kind);
    sol.phi = sys.solve(cost);
    sol.residual = ctmc_residual(tq, sol.phi, cost);
    return sol;
}

TruncatedSolution ctmc_truncated_potential(const GeneratorKernel& gen, const CostFunction& cost,
                                           std::size_t n, SolverKind kind) {
    const TruncatedGenerator tq = truncate_generator(gen, n);
    const std::vector<double> c = cost.head(n + 1);
    return ctmc_truncated_potential(tq, c, kind);
}

std::vector<SweepResult> ctmc_potential_sweep(const GeneratorKernel& gen, const CostFunction& cost,
                                              std::span<const State> states,
                                              std::span<const std::size_t> levels,
                                              const SweepOptions& options) {
    if (levels.empty()) throw DomainError("sweep needs at least one level");
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (levels[k] <= levels[k - 1]) throw DomainError("sweep levels must be strictly increasing");
    }
    for (State i : states) {
        if (i > levels.front()) throw DomainError("state exceeds the smallest truncation level");
    }
    std::vector<std::vector<double>> psi(levels.size());
    detail::parallel_for(levels.size(), options.threads, [&](std::size_t k) {
        psi[k] = ctmc_truncated_potential(gen, cost, levels[k], options.solver).phi;
    });
    std::vector<SweepResult> out(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        SweepResult& r = out[s];
        r.levels.assign(levels.begin(), levels.end());
        for (std::size_t k = 0; k < levels.size(); ++k) r.values.push_back(psi[k][states[s]]);
        r.verdict = sweep_verdict(r.values, options.tol, options.divergence_cap, cost.is_zero());
    }
    return out;
}

SweepResult ctmc_potential_sweep(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                 std::span<const std::size_t> levels, const SweepOptions& options) {
    const State states[] = {i};
    return std::move(ctmc_potential_sweep(gen, cost, states, levels, options).front());
}

ConvergentValue potential_upward_ct(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                    const SeriesPolicy& policy) {
    return potential_upward(RowMatrixUpward(gen), cost, i, policy);
}

ConvergentValue potential_downward_ct(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                      const DownwardOptions& options) {
    return potential_downward(RowMatrixDownward(gen), cost, i, options);
}

ConvergentValue eta(const GeneratorKernel& gen, const CostFunction& cost, const DownwardOptions& options) {
    return delta(RowMatrixDownward(gen), cost, options);
}

ConvergentValue birth_death_potential(const GeneratorKernel& gen, const CostFunction& cost, State i,
                                      const SeriesPolicy& policy) {
    if (gen.structure() != Structure::BirthDeath) {
        throw StructureViolation("birth-death formula needs a tridiagonal generator, got " +
                                 std::string(to_string(gen.structure())));
    }
    if (cost.is_zero()) return ConvergentValue{};
    SeriesPolicy p = policy;
    if (cost.horizon() > i) p.min_terms = std::max(p.min_terms, cost.horizon() - i);
    SeriesAccumulator acc(p);
    // u_m = sum_{k<=m} pi(k) c(k) / pi(m) = c(m) + u_{m-1} mu_m / lambda_{m-1}.
    double u = 0.0;
    double prev_birth = 0.0;
    std::vector<Entry> r;
    for (State m = 0;; ++m) {
        gen.row(m, m + 1, r);
        double birth = 0.0;
        double death = 0.0;
        for (const Entry& e : r) {
            if (e.col == m + 1) birth = e.value;
            if (m >= 1 && e.col == m - 1) death = e.value;
        }
        if (!(birth > 0.0)) throw StructureViolation("birth rate at state " + std::to_string(m) + " is zero");
        u = cost(m) + (m == 0 ? 0.0 : u * death / prev_birth);
        prev_birth = birth;
        if (m >= i && acc.add(u / birth)) break;
    }
    return acc.result();
}

} // namespace skipfree
