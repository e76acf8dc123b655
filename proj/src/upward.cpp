// SPDX-License-Identifier: Apache-2.0
#include "skipfree/upward.hpp"

#include "skipfree/errors.hpp"

namespace skipfree {

namespace {

// Sum of prefixes[k] * values[k - offset] over k = offset..n-1.
double prefix_dot(const std::vector<double>& prefixes, const std::vector<double>& values, State offset) {
    NeumaierSum s;
    for (State k = offset; k < prefixes.size(); ++k) {
        const double p = prefixes[k];
        if (p != 0.0) s.add(p * values[k - offset]);
    }
    return s.get();
}

SeriesPolicy with_horizon(SeriesPolicy policy, std::size_t horizon, State start) {
    if (horizon > start) policy.min_terms = std::max(policy.min_terms, horizon - start);
    return policy;
}

} // namespace

FTable f_table(const UpwardCoefficients& coeffs, State i, State n_max) {
    if (n_max < i) throw DomainError("F table needs n_max >= base state");
    FTable t;
    t.base = i;
    t.values.reserve(n_max - i + 1);
    t.values.push_back(1.0);
    std::vector<double> prefixes;
    for (State n = i + 1; n <= n_max; ++n) {
        const double up = coeffs.load_row(n, prefixes);
        t.values.push_back(prefix_dot(prefixes, t.values, i) / up);
    }
    // Rows up to n_max must carry an up step even if the table stops short of using them.
    if (n_max == i) coeffs.load_row(i, prefixes);
    return t;
}

FTable f_table(const TransitionKernel& kernel, State i, State n_max) {
    return f_table(RowMatrixUpward(kernel), i, n_max);
}

double weighted_sum_lemma(const UpwardCoefficients& coeffs, const CostFunction& cost, State i, State n) {
    if (n < i) throw DomainError("lemma sum needs n >= i");
    std::vector<double> prefixes;
    NeumaierSum s;
    for (State k = i; k <= n; ++k) {
        const double ck = cost(k);
        if (ck == 0.0) continue;
        const double up = coeffs.load_row(k, prefixes);
        s.add(f_table(coeffs, k, n).values.back() * ck / up);
    }
    return s.get();
}

double weighted_sum_lemma(const TransitionKernel& kernel, const CostFunction& cost, State i, State n) {
    return weighted_sum_lemma(RowMatrixUpward(kernel), cost, i, n);
}

ConvergentValue potential_upward(const UpwardCoefficients& coeffs, const CostFunction& cost, State i,
                                 const SeriesPolicy& policy) {
    if (cost.is_zero()) return ConvergentValue{};
    SeriesAccumulator acc(with_horizon(policy, cost.horizon(), i));
    std::vector<double> t;
    std::vector<double> prefixes;
    for (State m = 0;; ++m) {
        const double up = coeffs.load_row(m, prefixes);
        const double tm = (prefix_dot(prefixes, t, 0) + cost(m)) / up;
        t.push_back(tm);
        if (m >= i && acc.add(tm)) break;
    }
    return acc.result();
}

ConvergentValue potential_upward(const TransitionKernel& kernel, const CostFunction& cost, State i,
                                 const SeriesPolicy& policy) {
    return potential_upward(RowMatrixUpward(kernel), cost, i, policy);
}

ConvergentValue green_upward(const UpwardCoefficients& coeffs, State i, State j, const SeriesPolicy& policy) {
    std::vector<double> prefixes;
    const double up_j = coeffs.load_row(j, prefixes);
    std::vector<double> f{1.0};
    const State start = std::max(i, j);
    SeriesAccumulator acc(policy);
    for (State m = j;; ++m) {
        if (m > j) {
            const double up = coeffs.load_row(m, prefixes);
            f.push_back(prefix_dot(prefixes, f, j) / up);
        }
        if (m >= start && acc.add(f.back())) break;
    }
    ConvergentValue out = acc.result();
    out.value /= up_j;
    out.last_increment /= up_j;
    return out;
}

ConvergentValue green_upward(const TransitionKernel& kernel, State i, State j, const SeriesPolicy& policy) {
    return green_upward(RowMatrixUpward(kernel), i, j, policy);
}

Classification classify_upward(const UpwardCoefficients& coeffs, const SeriesPolicy& policy) {
    std::vector<double> prefixes;
    std::vector<double> f{1.0};
    SeriesAccumulator acc(policy);
    coeffs.load_row(0, prefixes);
    acc.add(1.0);
    for (State n = 1; !acc.finished(); ++n) {
        const double up = coeffs.load_row(n, prefixes);
        f.push_back(prefix_dot(prefixes, f, 0) / up);
        acc.add(f.back());
    }
    Classification c;
    c.criterion = acc.result();
    c.verdict = c.criterion.converged() ? Verdict::Transient : Verdict::Recurrent;
    return c;
}

Classification classify_upward(const TransitionKernel& kernel, const SeriesPolicy& policy) {
    return classify_upward(RowMatrixUpward(kernel), policy);
}

} // namespace skipfree
