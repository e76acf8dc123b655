// SPDX-License-Identifier: Apache-2.0
#include "skipfree/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "skipfree/coefficients.hpp"
#include "skipfree/ctmc.hpp"
#include "skipfree/downward.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/format.hpp"
#include "skipfree/models.hpp"
#include "skipfree/simulate.hpp"
#include "skipfree/spec_file.hpp"
#include "skipfree/truncation.hpp"
#include "skipfree/upward.hpp"

namespace skipfree {

namespace {

using nlohmann::json;

class UsageError : public Error {
public:
    using Error::Error;
};

std::size_t parse_index(std::string_view s, const char* what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
        throw UsageError(std::string("invalid ") + what + " \"" + std::string(s) + "\"");
    }
    return v;
}

// "3", "0..20", "1,4,9" or a mix such as "0..3,10".
std::vector<State> parse_states(const std::string& text) {
    std::vector<State> out;
    std::string_view rest = text;
    while (true) {
        const std::size_t comma = rest.find(',');
        const std::string_view part = rest.substr(0, comma);
        if (const std::size_t dots = part.find(".."); dots != std::string_view::npos) {
            const State a = parse_index(part.substr(0, dots), "state");
            const State b = parse_index(part.substr(dots + 2), "state");
            if (b < a) throw UsageError("empty state range \"" + std::string(part) + "\"");
            for (State s = a; s <= b; ++s) out.push_back(s);
        } else {
            out.push_back(parse_index(part, "state"));
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<std::size_t> parse_levels(const std::string& text) {
    std::vector<std::size_t> levels = parse_states(text);
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (levels[k] <= levels[k - 1]) throw UsageError("levels must be strictly increasing");
    }
    return levels;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int status_exit(Status s) {
    switch (s) {
    case Status::Converged: return kExitOk;
    case Status::Diverged: return kExitDiverged;
    case Status::IndexCapReached:
    case Status::Oscillating: return kExitUnsettled;
    }
    return kExitFailure;
}

// Diverged dominates unsettled, which dominates success.
int combine(int acc, Status s) {
    const int e = status_exit(s);
    if (acc == kExitDiverged || e == kExitDiverged) return kExitDiverged;
    return std::max(acc, e);
}

// Collects CSV text and writes it either to stdout or to a file with a
// sibling manifest.
class Emitter {
public:
    Emitter(std::string command, std::string out_path, std::ostream& out)
        : command_(std::move(command)), out_path_(std::move(out_path)), out_(out) {
        manifest_["command"] = command_;
        manifest_["parameters"] = json::object();
        manifest_["tolerances"] = json::object();
        manifest_["solver_paths"] = json::array();
    }

    std::ostringstream& csv() { return csv_; }
    json& manifest() { return manifest_; }

    void spec(const ChainSpec& s) {
        manifest_["model_spec"] = json::parse(s.source);
        manifest_["model"] = s.describe();
    }
    void path(const std::string& p) {
        auto& paths = manifest_["solver_paths"];
        if (std::find(paths.begin(), paths.end(), p) == paths.end()) paths.push_back(p);
    }

    void finish() {
        if (out_path_.empty()) {
            out_ << csv_.str();
            return;
        }
        const std::filesystem::path p(out_path_);
        write_file(p, csv_.str());
        manifest_["timestamp"] = utc_timestamp();
        manifest_["outputs"] = json::array({p.string()});
        write_file(std::filesystem::path(p.string() + ".manifest.json"), manifest_.dump(2) + "\n");
    }

private:
    static void write_file(const std::filesystem::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw UsageError("cannot write " + p.string());
        f << text;
        if (!f) throw UsageError("failed writing " + p.string());
    }

    std::string command_;
    std::string out_path_;
    std::ostream& out_;
    std::ostringstream csv_;
    json manifest_;
};

bool near(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b)); }

// Closed form of the potential when the chain is one of the packaged examples
// inside its regime.
std::optional<std::function<double(State)>> closed_form(const ChainSpec& spec) {
    const CostFunction::Geometric* g = spec.cost.as_geometric();
    if (spec.family == "gim1" && spec.z) {
        const double z = *spec.z;
        if (g && near(g->ratio, 1.0 / z) && !g->zero_at_origin && z > 2.0) {
            const double scale = g->scale;
            return [z, scale](State i) { return scale * gim1_closed_potential(z, i); };
        }
    } else if (spec.family == "mg1" && spec.z) {
        const double z = *spec.z;
        if (g && near(g->ratio, (z - 1.0) / z) && g->zero_at_origin && z > 1.0 && z < 2.0) {
            const double scale = g->scale;
            return [z, scale](State i) { return scale * mg1_closed_potential(z, i); };
        }
    } else if (spec.family == "birth_death" && spec.lambda && spec.mu) {
        const CostFunction::Indicator* ind = spec.cost.as_indicator();
        const double l = *spec.lambda;
        const double m = *spec.mu;
        if (ind && ind->states == std::vector<State>{0} && l > m) {
            return [l, m](State i) { return birth_death_closed_potential(l, m, i); };
        }
    }
    return std::nullopt;
}

bool infinite(const ChainSpec& spec) { return !spec.matrix().state_space().is_finite(); }

bool series_available(const ChainSpec& spec) {
    const Structure s = spec.matrix().structure();
    return infinite(spec) && (is_upward(s) || is_downward(s));
}

std::string series_refusal(const ChainSpec& spec) {
    if (!infinite(spec)) return "series method needs a countably infinite state space; use truncation";
    return "series method needs a skip-free structure tag, this chain is " +
           std::string(to_string(spec.matrix().structure()));
}

struct Row {
    ConvergentValue value;
    std::string path;
};

std::vector<Row> series_potentials(const ChainSpec& spec, std::span<const State> states, double tol) {
    SeriesPolicy policy;
    policy.tol = tol;
    DownwardOptions dopt;
    dopt.tol = tol;
    const Structure s = spec.matrix().structure();
    std::vector<Row> rows;
    if (!spec.continuous_time()) {
        if (is_upward(s)) {
            for (State i : states) rows.push_back({potential_upward(*spec.kernel, spec.cost, i, policy), "series"});
        } else {
            const RowMatrixDownward coeffs(*spec.kernel);
            for (ConvergentValue& v : potential_downward(coeffs, spec.cost, states, dopt)) {
                rows.push_back({v, "series"});
            }
        }
    } else if (s == Structure::BirthDeath) {
        for (State i : states) rows.push_back({birth_death_potential(*spec.generator, spec.cost, i, policy), "series"});
    } else if (is_upward(s)) {
        for (State i : states) rows.push_back({potential_upward_ct(*spec.generator, spec.cost, i, policy), "series"});
    } else {
        const RowMatrixDownward coeffs(*spec.generator);
        for (ConvergentValue& v : potential_downward(coeffs, spec.cost, states, dopt)) {
            rows.push_back({v, "series"});
        }
    }
    return rows;
}

// The default schedule clipped to [max state, n_max], ending at n_max; finite
// spaces stop at their last state.
std::vector<std::size_t> sweep_levels(const ChainSpec& spec, State max_state, std::size_t n_max) {
    const StateSpace ss = spec.matrix().state_space();
    if (ss.is_finite()) n_max = std::min(n_max, *ss.n_states - 1);
    if (max_state > n_max) {
        throw UsageError("state " + std::to_string(max_state) + " exceeds the truncation limit " +
                         std::to_string(n_max));
    }
    std::vector<std::size_t> levels;
    for (std::size_t n : default_levels()) {
        if (n >= max_state && n < n_max) levels.push_back(n);
    }
    levels.push_back(n_max);
    return levels;
}

std::vector<Row> truncation_potentials(const ChainSpec& spec, std::span<const State> states, double sweep_tol,
                                       std::size_t n_max) {
    const State max_state = *std::max_element(states.begin(), states.end());
    const std::vector<std::size_t> levels = sweep_levels(spec, max_state, n_max);
    SweepOptions opt;
    opt.tol = sweep_tol;
    std::vector<SweepResult> sweeps =
        spec.continuous_time() ? ctmc_potential_sweep(*spec.generator, spec.cost, states, levels, opt)
                               : potential_sweep(*spec.kernel, spec.cost, states, levels, opt);
    std::vector<Row> rows;
    for (SweepResult& r : sweeps) {
        ConvergentValue v = r.verdict;
        // A finite chain truncated at its last state is the chain itself.
        if (!infinite(spec) && levels.back() + 1 == *spec.matrix().state_space().n_states &&
            std::isfinite(r.values.back())) {
            v.value = r.values.back();
            v.status = Status::Converged;
        }
        rows.push_back({v, "truncation"});
    }
    return rows;
}

struct Common {
    std::string spec_path;
    std::string out;
};

ChainSpec load(const std::string& path, Emitter& em) {
    ChainSpec spec = load_spec(path);
    em.spec(spec);
    em.manifest()["spec_path"] = path;
    return spec;
}

struct PotentialArgs {
    Common c;
    std::string states = "0";
    std::string method = "auto";
    double tol = 1e-10;
    double sweep_tol = 1e-9;
    std::size_t n_max = 800;
};

int cmd_potential(const PotentialArgs& a, std::ostream& out) {
    Emitter em("potential", a.c.out, out);
    const ChainSpec spec = load(a.c.spec_path, em);
    const std::vector<State> states = parse_states(a.states);
    em.manifest()["parameters"] = {{"i", a.states}, {"method", a.method}, {"n_max", a.n_max}};
    em.manifest()["tolerances"] = {{"series", a.tol}, {"sweep", a.sweep_tol}};

    std::vector<Row> rows;
    auto closed = closed_form(spec);
    if (a.method == "closed" || (a.method == "auto" && closed)) {
        if (!closed) {
            throw UsageError("no closed form for " + spec.describe() + " with cost " + spec.cost.describe());
        }
        for (State i : states) rows.push_back({ConvergentValue{(*closed)(i), Status::Converged, 0, 0.0}, "closed-form"});
    } else if (a.method == "series" || (a.method == "auto" && series_available(spec))) {
        if (!series_available(spec)) throw UsageError(series_refusal(spec));
        rows = series_potentials(spec, states, a.tol);
    } else if (a.method == "truncation" || a.method == "auto") {
        rows = truncation_potentials(spec, states, a.sweep_tol, a.n_max);
    } else {
        throw UsageError("unknown method \"" + a.method + "\"");
    }

    int code = kExitOk;
    em.csv() << "i,phi,status,path\n";
    for (std::size_t k = 0; k < states.size(); ++k) {
        const Row& r = rows[k];
        em.csv() << states[k] << ',' << format_double(r.value.value) << ',' << to_string(r.value.status) << ','
                 << r.path << '\n';
        em.path(r.path);
        code = combine(code, r.value.status);
    }
    em.finish();
    return code;
}

struct FigureArgs {
    int example = 1;
    std::string out;
};

int cmd_figure(const FigureArgs& a, std::ostream& out) {
    Emitter em("figure", a.out, out);
    em.manifest()["parameters"] = {{"example", a.example}, {"i", "0..20"}};
    em.path("closed-form");
    em.csv() << "z,i,phi\n";
    const std::vector<double> zs =
        a.example == 1 ? std::vector<double>{3.0, 5.0, 10.0} : std::vector<double>{1.2, 1.5, 1.8};
    for (double z : zs) {
        for (State i = 0; i <= 20; ++i) {
            const double phi = a.example == 1 ? gim1_closed_potential(z, i) : mg1_closed_potential(z, i);
            em.csv() << format_double(z) << ',' << i << ',' << format_double(phi) << '\n';
        }
    }
    em.finish();
    return kExitOk;
}

struct GreenArgs {
    Common c;
    std::string i = "0";
    std::string j = "0";
    std::string method = "auto";
    double tol = 1e-10;
    double sweep_tol = 1e-9;
    std::size_t n_max = 800;
};

int cmd_green(const GreenArgs& a, std::ostream& out) {
    Emitter em("green", a.c.out, out);
    const ChainSpec spec = load(a.c.spec_path, em);
    if (spec.continuous_time()) throw UsageError("green is defined for discrete-time chains only");
    const std::vector<State> is = parse_states(a.i);
    const std::vector<State> js = parse_states(a.j);
    em.manifest()["parameters"] = {{"i", a.i}, {"j", a.j}, {"method", a.method}, {"n_max", a.n_max}};
    em.manifest()["tolerances"] = {{"series", a.tol}, {"sweep", a.sweep_tol}};

    bool series = false;
    if (a.method == "series") {
        if (!series_available(spec)) throw UsageError(series_refusal(spec));
        series = true;
    } else if (a.method == "auto") {
        series = series_available(spec);
    } else if (a.method != "truncation") {
        throw UsageError("unknown method \"" + a.method + "\" (green supports auto, series, truncation)");
    }

    int code = kExitOk;
    em.csv() << "i,j,green,status,path\n";
    const Structure s = spec.kernel->structure();
    std::vector<std::size_t> levels;
    if (!series) {
        const State top = std::max(*std::max_element(is.begin(), is.end()), *std::max_element(js.begin(), js.end()));
        levels = sweep_levels(spec, top, a.n_max);
    }
    for (State i : is) {
        for (State j : js) {
            ConvergentValue v;
            if (series) {
                SeriesPolicy p;
                p.tol = a.tol;
                DownwardOptions d;
                d.tol = a.tol;
                v = is_upward(s) ? green_upward(*spec.kernel, i, j, p) : green_downward(*spec.kernel, i, j, d);
            } else {
                SweepOptions opt;
                opt.tol = a.sweep_tol;
                const SweepResult r = green_sweep(*spec.kernel, i, j, levels, opt);
                v = r.verdict;
                if (!infinite(spec) && levels.back() + 1 == *spec.kernel->state_space().n_states) {
                    v.value = r.values.back();
                    v.status = Status::Converged;
                }
            }
            const std::string path = series ? "series" : "truncation";
            em.csv() << i << ',' << j << ',' << format_double(v.value) << ',' << to_string(v.status) << ','
                     << path << '\n';
            em.path(path);
            code = combine(code, v.status);
        }
    }
    em.finish();
    return code;
}

struct ClassifyArgs {
    std::string spec_path;
    double tol = 1e-10;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out) {
    const ChainSpec spec = load_spec(a.spec_path);
    std::shared_ptr<const TransitionKernel> kernel = spec.kernel;
    // Transience of a continuous-time chain is that of its jump chain.
    if (spec.continuous_time()) kernel = embed(spec.generator, CostFunction::zero()).kernel;
    const Structure s = kernel->structure();
    if (!infinite(spec)) {
        throw UsageError("classification needs a countably infinite state space");
    }
    if (!is_upward(s) && !is_downward(s)) {
        throw UsageError("classification needs a skip-free structure tag, this chain is " +
                         std::string(to_string(s)));
    }
    Classification c;
    std::string criterion;
    if (is_upward(s)) {
        SeriesPolicy p;
        p.tol = a.tol;
        c = classify_upward(*kernel, p);
        criterion = "\xce\xa3 F_n^(0)";
    } else {
        DownwardOptions d;
        d.tol = a.tol;
        c = classify_downward(*kernel, d);
        criterion = "M(0)";
    }
    out << to_string(c.verdict) << " (" << criterion;
    switch (c.criterion.status) {
    case Status::Converged: out << " = " << format_double(c.criterion.value); break;
    case Status::Diverged: out << " diverges"; break;
    case Status::IndexCapReached: out << " undecided at the index cap"; break;
    case Status::Oscillating: out << " oscillates"; break;
    }
    out << ")\n";
    return c.criterion.status == Status::Converged || c.criterion.status == Status::Diverged ? kExitOk
                                                                                              : kExitUnsettled;
}

struct ConvergeArgs {
    Common c;
    std::size_t i = 0;
    std::optional<std::size_t> j;
    std::string levels;
    double sweep_tol = 1e-9;
};

int cmd_converge(const ConvergeArgs& a, std::ostream& out) {
    Emitter em("converge", a.c.out, out);
    const ChainSpec spec = load(a.c.spec_path, em);
    const std::vector<std::size_t> levels =
        a.levels.empty() ? sweep_levels(spec, std::max(a.i, a.j.value_or(0)), 800) : parse_levels(a.levels);
    json params = {{"i", a.i}, {"levels", levels}};
    if (a.j) params["j"] = *a.j;
    em.manifest()["parameters"] = params;
    em.manifest()["tolerances"] = {{"sweep", a.sweep_tol}};
    em.path("truncation");
    SweepOptions opt;
    opt.tol = a.sweep_tol;
    SweepResult r;
    if (a.j) {
        if (spec.continuous_time()) throw UsageError("green sweeps are defined for discrete-time chains only");
        r = green_sweep(*spec.kernel, a.i, *a.j, levels, opt);
    } else if (spec.continuous_time()) {
        r = ctmc_potential_sweep(*spec.generator, spec.cost, a.i, levels, opt);
    } else {
        r = potential_sweep(*spec.kernel, spec.cost, a.i, levels, opt);
    }
    write_sweep_csv(em.csv(), r);
    em.finish();
    return status_exit(r.verdict.status);
}

struct SimulateArgs {
    Common c;
    std::string states = "0";
    std::size_t reps = 100000;
    std::uint64_t seed = 1;
    std::size_t n = 200;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    Emitter em("simulate", a.c.out, out);
    const ChainSpec spec = load(a.c.spec_path, em);
    const std::vector<State> states = parse_states(a.states);
    std::size_t n = a.n;
    const StateSpace ss = spec.matrix().state_space();
    if (ss.is_finite()) n = std::min(n, *ss.n_states - 1);
    for (State i : states) {
        if (i > n) throw UsageError("state " + std::to_string(i) + " lies outside the truncation at " + std::to_string(n));
    }
    em.manifest()["parameters"] = {{"i", a.states}, {"reps", a.reps}, {"seed", a.seed}, {"n", n}};
    em.path("simulation");
    em.path("truncation");
    SimOptions opt;
    opt.replications = a.reps;
    opt.seed = a.seed;
    em.csv() << "i,mean,std_error,replications,seed,exact\n";
    const std::vector<double> cost = spec.cost.head(n + 1);
    auto emit = [&](State i, const SimEstimate& e, double exact) {
        em.csv() << i << ',' << format_double(e.mean) << ',' << format_double(e.std_error) << ',' << e.replications
                 << ',' << e.seed << ',' << format_double(exact) << '\n';
    };
    if (spec.continuous_time()) {
        const TruncatedGenerator tq = truncate_generator(*spec.generator, n);
        const std::vector<double> exact = ctmc_truncated_potential(tq, cost).phi;
        for (State i : states) emit(i, simulate_ctmc(tq, cost, i, opt), exact[i]);
    } else {
        const TruncatedChain tc = northwest_truncate(*spec.kernel, n);
        const std::vector<double> exact = solve_truncated_potential(tc, cost).phi;
        for (State i : states) emit(i, simulate_dtmc(tc, cost, i, opt), exact[i]);
    }
    em.finish();
    return kExitOk;
}

struct ValidateArgs {
    std::string spec_path;
    std::size_t i_max = 200;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
    const ChainSpec spec = load_spec(a.spec_path);
    State i_max = a.i_max;
    const StateSpace ss = spec.matrix().state_space();
    if (ss.is_finite()) i_max = std::min(i_max, *ss.n_states - 1);
    const ValidationReport rep = spec.continuous_time() ? validate_generator(*spec.generator, i_max)
                                                        : validate_kernel(*spec.kernel, i_max);
    out << spec.describe() << ": structure " << to_string(spec.matrix().structure()) << ", rows 0.." << i_max
        << '\n';
    for (const Violation& v : rep.violations) out << "  " << v.kind << ": " << v.message << '\n';
    out << (rep.ok() ? "valid" : std::to_string(rep.violations.size()) + " violation(s)") << '\n';
    return rep.ok() ? kExitOk : kExitUsage;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("spec", c.spec_path, "chain specification (JSON)")->required();
    sub->add_option("--out", c.out, "write CSV here (plus a .manifest.json sibling) instead of stdout");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Potentials and Green matrices of skip-free Markov chains", "skipfree"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "expand help for every subcommand");

    PotentialArgs pot;
    auto* p = app.add_subcommand("potential", "minimal nonnegative solution of the Poisson equation");
    add_common(p, pot.c);
    p->add_option("--i", pot.states, "states: 3, 0..20 or 1,4,9")->capture_default_str();
    p->add_option("--method", pot.method, "auto, closed, series or truncation")
        ->check(CLI::IsMember({"auto", "closed", "series", "truncation"}))
        ->capture_default_str();
    p->add_option("--tol", pot.tol, "series tolerance")->capture_default_str();
    p->add_option("--sweep-tol", pot.sweep_tol, "truncation sweep tolerance")->capture_default_str();
    p->add_option("--n-max", pot.n_max, "largest truncation level")->capture_default_str();

    FigureArgs fig;
    auto* f = app.add_subcommand("figure", "closed-form potentials of the packaged queue examples");
    f->add_option("--example", fig.example, "1 (GI/M/1) or 2 (M/G/1)")->check(CLI::IsMember({1, 2}))->required();
    f->add_option("--out", fig.out, "write CSV here (plus a .manifest.json sibling) instead of stdout");

    GreenArgs green;
    auto* g = app.add_subcommand("green", "Green matrix entries G(i,j)");
    add_common(g, green.c);
    g->add_option("--i", green.i, "row states")->capture_default_str();
    g->add_option("--j", green.j, "column states")->capture_default_str();
    g->add_option("--method", green.method, "auto, series or truncation")
        ->check(CLI::IsMember({"auto", "series", "truncation"}))
        ->capture_default_str();
    g->add_option("--tol", green.tol, "series tolerance")->capture_default_str();
    g->add_option("--sweep-tol", green.sweep_tol, "truncation sweep tolerance")->capture_default_str();
    g->add_option("--n-max", green.n_max, "largest truncation level")->capture_default_str();

    ClassifyArgs cls;
    auto* c = app.add_subcommand("classify", "transience test for skip-free chains");
    c->add_option("spec", cls.spec_path, "chain specification (JSON)")->required();
    c->add_option("--tol", cls.tol, "series tolerance")->capture_default_str();

    ConvergeArgs conv;
    std::size_t conv_j = 0;
    auto* v = app.add_subcommand("converge", "truncated values across levels n");
    add_common(v, conv.c);
    v->add_option("--i", conv.i, "state")->capture_default_str();
    auto* jopt = v->add_option("--j", conv_j, "column state: sweep G_n(i,j) instead of the potential");
    v->add_option("--levels", conv.levels, "comma-separated increasing levels");
    v->add_option("--sweep-tol", conv.sweep_tol, "relative tolerance between levels")->capture_default_str();

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Monte Carlo estimate on the truncated chain");
    add_common(s, sim.c);
    s->add_option("--i", sim.states, "start states")->capture_default_str();
    s->add_option("--reps", sim.reps, "replications")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--seed", sim.seed, "random seed")->capture_default_str();
    s->add_option("--n", sim.n, "truncation level")->capture_default_str();

    ValidateArgs val;
    auto* k = app.add_subcommand("validate", "check rows of the chain");
    k->add_option("spec", val.spec_path, "chain specification (JSON)")->required();
    k->add_option("--i-max", val.i_max, "last row checked")->capture_default_str();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*p) return cmd_potential(pot, out);
        if (*f) return cmd_figure(fig, out);
        if (*g) return cmd_green(green, out);
        if (*c) return cmd_classify(cls, out);
        if (*v) {
            if (*jopt) conv.j = conv_j;
            return cmd_converge(conv, out);
        }
        if (*s) return cmd_simulate(sim, out);
        if (*k) return cmd_validate(val, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const StructureViolation& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapabilityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace skipfree
