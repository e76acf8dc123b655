// SPDX-License-Identifier: Apache-2.0
#include "skipfree/downward.hpp"

#include <algorithm>
#include <limits>
#include <type_traits>

#include "skipfree/errors.hpp"

namespace skipfree {

namespace {

#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

constexpr double kInf = std::numeric_limits<double>::infinity();

// x * 2^e without libm support for Wide.
template <class T>
T scale2(T x, int e) {
    const T up = static_cast<T>(std::ldexp(1.0, 256));
    const T down = static_cast<T>(std::ldexp(1.0, -256));
    for (; e >= 256; e -= 256) x *= up;
    for (; e <= -256; e += 256) x *= down;
    return x * static_cast<T>(std::ldexp(1.0, e));
}

template <class T>
struct Rescale;
template <>
struct Rescale<double> {
    static constexpr int exp = 512;
};
template <>
struct Rescale<Wide> {
    static constexpr int exp = 8192;
};

// H_m^{(i)} = scaled[m-1] * 2^log2_scale.
template <class T>
struct Table {
    State target = 0;
    std::vector<T> scaled;
    int log2_scale = 0;
};

template <class T>
Table<T> build_h(const DownwardCoefficients& coeffs, State i, std::vector<double>& tails) {
    constexpr int kExp = Rescale<T>::exp;
    const T limit = scale2(T(1), kExp);
    Table<T> t;
    t.target = i;
    t.scaled.assign(i, T(0));
    if (i == 0) return t;
    t.scaled[i - 1] = T(1);
    for (State m = i - 1; m >= 1; --m) {
        coeffs.load_tails(m, i, tails);
        const std::size_t len = std::min<std::size_t>(tails.size(), i - m);
        T s = 0;
        if constexpr (std::is_same_v<T, double>) {
            NeumaierSum acc;
            for (std::size_t l = 0; l < len; ++l) {
                if (tails[l] != 0.0) acc.add(tails[l] * t.scaled[m + l]);
            }
            s = acc.get();
        } else {
            for (std::size_t l = 0; l < len; ++l) {
                if (tails[l] != 0.0) s += static_cast<T>(tails[l]) * t.scaled[m + l];
            }
        }
        const T h = s / static_cast<T>(coeffs.down(m));
        t.scaled[m - 1] = h;
        if (h > limit) {
            for (State k = m; k <= i; ++k) t.scaled[k - 1] = scale2(t.scaled[k - 1], -kExp);
            t.log2_scale += kExp;
        }
    }
    return t;
}

// H table for target n in extended precision, with D_n = sum_k P_0^{(k+)} H_k^{(n)}
// and the suffix sums N_n(i) = sum_{m=i+1..n} H_m^{(n)}, all in the table's scale.
struct Column {
    Table<Wide> h;
    Wide d = 0;
    std::vector<Wide> suffix;  // suffix[i] = N_n(i), i = 0..n-1

    State target() const noexcept { return h.target; }
    Wide numerator(State i) const { return i < suffix.size() ? suffix[i] : Wide(0); }
    double unscale(Wide x) const { return static_cast<double>(scale2(x, h.log2_scale)); }
};

Column build_column(const DownwardCoefficients& coeffs, State n, std::vector<double>& tails) {
    Column c;
    c.h = build_h<Wide>(coeffs, n, tails);
    coeffs.load_tails(0, n, tails);
    const std::size_t len = std::min<std::size_t>(tails.size(), n);
    for (std::size_t l = 0; l < len; ++l) {
        if (tails[l] != 0.0) c.d += static_cast<Wide>(tails[l]) * c.h.scaled[l];
    }
    c.suffix.assign(n, Wide(0));
    Wide s = 0;
    for (State m = n; m >= 1; --m) {
        s += c.h.scaled[m - 1];
        c.suffix[m - 1] = s;
    }
    return c;
}

// Decides a limit observed on a level schedule.
class LevelTracker {
public:
    LevelTracker(double tol, double cap) : tol_(tol), cap_(cap) {}

    bool decided() const noexcept { return decided_; }

    void add(double r) {
        if (decided_) return;
        ++count_;
        if (!std::isfinite(r) || r > cap_) {
            finish(Status::Diverged, kInf, have_prev_ ? r - prev_ : r);
            return;
        }
        if (have_prev_) {
            const double inc = r - prev_;
            if (std::fabs(inc) <= tol_ * std::fabs(r)) {
                finish(Status::Converged, r, inc);
                return;
            }
            if (have_inc_) {
                if ((inc > 0.0) != (last_inc_ > 0.0)) {
                    ++sign_changes_;
                    growth_run_ = 0;
                } else if (inc > 0.0 && inc >= 0.9 * last_inc_) {
                    ++growth_run_;
                } else {
                    growth_run_ = 0;
                }
                if (growth_run_ >= 3) {
                    finish(Status::Diverged, kInf, inc);
                    return;
                }
                if (sign_changes_ >= 3) {
                    finish(Status::Oscillating, r, inc);
                    return;
                }
            }
            last_inc_ = inc;
            have_inc_ = true;
        }
        prev_ = r;
        have_prev_ = true;
    }

    ConvergentValue result() const {
        if (decided_) return out_;
        ConvergentValue v;
        v.value = prev_;
        v.status = sign_changes_ >= 2 ? Status::Oscillating : Status::IndexCapReached;
        v.terms_used = count_;
        v.last_increment = last_inc_;
        return v;
    }

private:
    void finish(Status s, double value, double inc) {
        decided_ = true;
        out_ = ConvergentValue{value, s, count_, inc};
    }

    double tol_;
    double cap_;
    bool decided_ = false;
    bool have_prev_ = false;
    bool have_inc_ = false;
    double prev_ = 0.0;
    double last_inc_ = 0.0;
    std::size_t count_ = 0;
    std::size_t growth_run_ = 0;
    std::size_t sign_changes_ = 0;
    ConvergentValue out_;
};

// M(i) with its last ratio kept in extended precision.
struct MValue {
    RatioLimit limit;
    Wide value = 0;
};

std::vector<MValue> ratios_at(const DownwardCoefficients& coeffs, std::span<const State> states,
                              const DownwardOptions& options, double tol) {
    std::vector<MValue> out(states.size());
    std::vector<LevelTracker> trackers(states.size(), LevelTracker(tol, options.ratio_cap));
    for (std::size_t s = 0; s < states.size(); ++s) out[s].limit.i = states[s];
    std::vector<double> tails;
    for (std::size_t n : options.ratio_levels) {
        bool needed = false;
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (!trackers[s].decided() && states[s] < n) needed = true;
        }
        if (!needed) continue;
        const Column col = build_column(coeffs, n, tails);
        for (std::size_t s = 0; s < states.size(); ++s) {
            const State i = states[s];
            if (trackers[s].decided() || i >= n) continue;
            const Wide r = col.d > 0 ? col.numerator(i) / col.d : Wide(kInf);
            out[s].limit.levels.push_back(n);
            out[s].limit.ratios.push_back(static_cast<double>(r));
            out[s].value = r;
            trackers[s].add(static_cast<double>(r));
        }
    }
    for (std::size_t s = 0; s < states.size(); ++s) {
        out[s].limit.verdict = trackers[s].result();
        if (out[s].limit.verdict.status == Status::Diverged) out[s].value = Wide(kInf);
    }
    return out;
}

SeriesPolicy column_policy(const DownwardOptions& options, double tol, std::size_t horizon, State start) {
    SeriesPolicy p = options.series;
    p.tol = tol;
    p.index_cap = std::min(p.index_cap, options.column_cap);
    if (horizon > start) p.min_terms = std::max(p.min_terms, horizon - start);
    return p;
}

// A finitely supported cost makes delta a finite sum, however large.
SeriesPolicy delta_policy(const DownwardOptions& options, double tol, const CostFunction& cost) {
    SeriesPolicy p = column_policy(options, tol, cost.horizon(), 0);
    if (cost.finite_support()) p.divergence_cap = kInf;
    return p;
}

// c(0) + sum_k c(k)/P(k,k-1) D_k, summed by columns.
ConvergentValue delta_sum(const DownwardCoefficients& coeffs, const CostFunction& cost,
                          const DownwardOptions& options) {
    SeriesAccumulator acc(delta_policy(options, options.tol, cost));
    acc.add(cost(0));
    std::vector<double> tails;
    for (State k = 1; !acc.finished() && k <= options.column_cap; ++k) {
        const double ck = cost(k);
        if (ck == 0.0) {
            acc.add(0.0);
            continue;
        }
        const Column col = build_column(coeffs, k, tails);
        acc.add(ck / coeffs.down(k) * col.unscale(col.d));
    }
    return acc.result();
}

// P(k,k-1) G(i,k) = M(i) D_k - N_k(i), with N_k(i) = 0 for k <= i.
double green_scaled(const Column& col, State i, Wide m) {
    const Wide g = m * col.d - col.numerator(i);
    return g > 0 ? col.unscale(g) : 0.0;
}

int severity(Status s) {
    switch (s) {
    case Status::Converged: return 0;
    case Status::IndexCapReached: return 1;
    case Status::Oscillating: return 2;
    case Status::Diverged: return 3;
    }
    return 3;
}

struct PotentialParts {
    ConvergentValue delta;
    ConvergentValue m;
    ConvergentValue series;  // sum_k c(k) G(i,k)
    double lead = 0.0;       // delta M(i)
    double tail = 0.0;       // sum_{m>i} sum_{k>=m} H_m^{(k)} c(k)/P(k,k-1)
};

// phi(i) = delta M(i) - S(i) regrouped by columns k as
// c(0) M(i) + sum_k c(k)/P(k,k-1) (M(i) D_k - N_k(i)); every term is c(k) G(i,k) >= 0.
// M(i) is known only to its level-N ratio, so each term carries an error of
// c(k)/P(k,k-1) D_k |M(i) - r_N(i)|; a finite delta bounds their total.
std::vector<PotentialParts> potential_parts(const DownwardCoefficients& coeffs, const CostFunction& cost,
                                            std::span<const State> states, const DownwardOptions& options,
                                            double tol) {
    std::vector<PotentialParts> out(states.size());
    std::vector<MValue> m(states.size());
    if (options.analytic_m) {
        for (std::size_t s = 0; s < states.size(); ++s) {
            const double v = options.analytic_m(states[s]);
            m[s].limit.verdict = ConvergentValue{v};
            m[s].value = static_cast<Wide>(v);
        }
    } else {
        m = ratios_at(coeffs, states, options, tol / 10.0);
    }

    const std::size_t horizon = cost.horizon();
    std::vector<SeriesAccumulator> acc;
    std::vector<NeumaierSum> lead(states.size());
    std::vector<NeumaierSum> tail(states.size());
    std::vector<std::size_t> open;
    acc.reserve(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        out[s].m = m[s].limit.verdict;
        acc.emplace_back(column_policy(options, tol, horizon, 0));
        if (out[s].m.status == Status::Diverged) continue;
        const double g0 = cost(0) * static_cast<double>(m[s].value);
        acc[s].add(g0);
        lead[s].add(g0);
        open.push_back(s);
    }
    SeriesAccumulator delta_acc(delta_policy(options, tol, cost));
    delta_acc.add(cost(0));
    std::vector<double> tails;
    for (State k = 1; k <= options.column_cap; ++k) {
        std::erase_if(open, [&](std::size_t s) { return acc[s].finished(); });
        if (open.empty() && delta_acc.finished()) break;
        const double ck = cost(k);
        if (ck == 0.0) {
            delta_acc.add(0.0);
            for (std::size_t s : open) acc[s].add(0.0);
            continue;
        }
        const Column col = build_column(coeffs, k, tails);
        const double w = ck / coeffs.down(k);
        delta_acc.add(w * col.unscale(col.d));
        for (std::size_t s : open) {
            const State i = states[s];
            acc[s].add(w * green_scaled(col, i, m[s].value));
            lead[s].add(w * col.unscale(m[s].value * col.d));
            tail[s].add(w * col.unscale(col.numerator(i)));
        }
    }
    for (std::size_t s = 0; s < states.size(); ++s) {
        out[s].delta = delta_acc.result();
        if (out[s].m.status == Status::Diverged) continue;
        out[s].series = acc[s].result();
        out[s].lead = lead[s].get();
        out[s].tail = tail[s].get();
    }
    return out;
}

bool cancels(const PotentialParts& p) {
    return p.m.status != Status::Diverged && std::isfinite(p.lead) && p.tail > 0.9 * p.lead;
}

ConvergentValue combine(const PotentialParts& p) {
    if (p.m.status == Status::Diverged) {
        // Recurrent: phi is infinite unless the cost vanishes wherever it is summed.
        const ConvergentValue& d = p.delta;
        if (d.converged() && d.value == 0.0) return ConvergentValue{0.0, Status::Converged, d.terms_used, 0.0};
        return ConvergentValue{kInf, Status::Diverged, p.m.terms_used, p.m.last_increment};
    }
    if (p.delta.status == Status::Diverged) {
        return ConvergentValue{kInf, Status::Diverged, p.delta.terms_used, p.delta.last_increment};
    }
    ConvergentValue out = p.series;
    for (Status s : {p.m.status, p.delta.status}) {
        if (severity(s) > severity(out.status)) out.status = s;
    }
    if (out.status == Status::Diverged) out.value = kInf;
    return out;
}

} // namespace

HTable h_table(const DownwardCoefficients& coeffs, State i) {
    std::vector<double> tails;
    Table<double> t = build_h<double>(coeffs, i, tails);
    return HTable{t.target, std::move(t.scaled), t.log2_scale};
}

HTable h_table(const TransitionKernel& kernel, State i) { return h_table(RowMatrixDownward(kernel), i); }

double lemma_sum_downward(const DownwardCoefficients& coeffs, const CostFunction& cost, State i, State n) {
    if (i < 1 || n < i) throw DomainError("lemma sum needs 1 <= i <= n");
    std::vector<double> tails;
    NeumaierSum s;
    for (State k = i; k <= n; ++k) {
        const double ck = cost(k);
        if (ck == 0.0) continue;
        const Table<double> h = build_h<double>(coeffs, k, tails);
        s.add(std::ldexp(h.scaled[i - 1], h.log2_scale) * ck / coeffs.down(k));
    }
    return s.get();
}

double lemma_sum_downward(const TransitionKernel& kernel, const CostFunction& cost, State i, State n) {
    return lemma_sum_downward(RowMatrixDownward(kernel), cost, i, n);
}

RatioLimit m_ratio(const DownwardCoefficients& coeffs, State i, const DownwardOptions& options) {
    const State states[] = {i};
    return std::move(ratios_at(coeffs, states, options, options.tol).front().limit);
}

RatioLimit m_ratio(const TransitionKernel& kernel, State i, const DownwardOptions& options) {
    return m_ratio(RowMatrixDownward(kernel), i, options);
}

std::vector<RatioLimit> m_ratios(const DownwardCoefficients& coeffs, std::span<const State> states,
                                 const DownwardOptions& options) {
    std::vector<RatioLimit> out;
    for (MValue& m : ratios_at(coeffs, states, options, options.tol)) out.push_back(std::move(m.limit));
    return out;
}

ConvergentValue delta(const DownwardCoefficients& coeffs, const CostFunction& cost,
                      const DownwardOptions& options) {
    if (cost.is_zero()) return ConvergentValue{};
    return delta_sum(coeffs, cost, options);
}

ConvergentValue delta(const TransitionKernel& kernel, const CostFunction& cost, const DownwardOptions& options) {
    return delta(RowMatrixDownward(kernel), cost, options);
}

std::vector<ConvergentValue> potential_downward(const DownwardCoefficients& coeffs, const CostFunction& cost,
                                                std::span<const State> states,
                                                const DownwardOptions& options) {
    std::vector<ConvergentValue> out(states.size());
    if (cost.is_zero() || states.empty()) return out;
    std::vector<PotentialParts> parts = potential_parts(coeffs, cost, states, options, options.tol);
    std::vector<State> retry;
    std::vector<std::size_t> where;
    for (std::size_t s = 0; s < states.size(); ++s) {
        if (cancels(parts[s])) {
            retry.push_back(states[s]);
            where.push_back(s);
        }
    }
    if (!retry.empty()) {
        std::vector<PotentialParts> fine = potential_parts(coeffs, cost, retry, options, options.tol / 100.0);
        for (std::size_t r = 0; r < retry.size(); ++r) parts[where[r]] = fine[r];
    }
    for (std::size_t s = 0; s < states.size(); ++s) out[s] = combine(parts[s]);
    return out;
}

ConvergentValue potential_downward(const DownwardCoefficients& coeffs, const CostFunction& cost, State i,
                                   const DownwardOptions& options) {
    const State states[] = {i};
    return potential_downward(coeffs, cost, states, options).front();
}

ConvergentValue potential_downward(const TransitionKernel& kernel, const CostFunction& cost, State i,
                                   const DownwardOptions& options) {
    return potential_downward(RowMatrixDownward(kernel), cost, i, options);
}

ConvergentValue green_downward(const DownwardCoefficients& coeffs, State i, State j,
                               const DownwardOptions& options) {
    MValue m;
    if (options.analytic_m) {
        const double v = options.analytic_m(i);
        m.limit.verdict = ConvergentValue{v};
        m.value = static_cast<Wide>(v);
    } else {
        const State states[] = {i};
        m = std::move(ratios_at(coeffs, states, options, options.tol / 10.0).front());
    }
    if (j == 0 || !m.limit.verdict.converged()) return m.limit.verdict;
    std::vector<double> tails;
    const Column col = build_column(coeffs, j, tails);
    const double down = coeffs.down(j);
    ConvergentValue out = m.limit.verdict;
    out.value = green_scaled(col, i, m.value) / down;
    out.last_increment = m.limit.verdict.last_increment * col.unscale(col.d) / down;
    return out;
}

ConvergentValue green_downward(const TransitionKernel& kernel, State i, State j,
                               const DownwardOptions& options) {
    return green_downward(RowMatrixDownward(kernel), i, j, options);
}

Classification classify_downward(const DownwardCoefficients& coeffs, const DownwardOptions& options) {
    Classification c;
    c.criterion = m_ratio(coeffs, 0, options).verdict;
    switch (c.criterion.status) {
    case Status::Converged: c.verdict = Verdict::Transient; break;
    case Status::Diverged: c.verdict = Verdict::Recurrent; break;
    default: c.verdict = Verdict::Unknown; break;
    }
    return c;
}

Classification classify_downward(const TransitionKernel& kernel, const DownwardOptions& options) {
    return classify_downward(RowMatrixDownward(kernel), options);
}

} // namespace skipfree
