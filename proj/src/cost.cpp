// SPDX-License-Identifier: Apache-2.0
#include "skipfree/cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "skipfree/errors.hpp"

namespace skipfree {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

CostFunction CostFunction::geometric(double ratio, double scale, bool zero_at_origin) {
    if (!(ratio >= 0.0) || !std::isfinite(ratio) || !(scale >= 0.0) || !std::isfinite(scale)) {
        throw DomainError("geometric cost needs finite nonnegative ratio and scale");
    }
    return CostFunction(Geometric{ratio, scale, zero_at_origin});
}

CostFunction CostFunction::indicator(std::vector<State> states) {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    return CostFunction(Indicator{std::move(states)});
}

CostFunction CostFunction::table(std::vector<double> values, double beyond) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw DomainError("cost table entry " + std::to_string(i) + " is negative or not finite");
        }
    }
    if (!(beyond >= 0.0) || !std::isfinite(beyond)) {
        throw DomainError("cost table default is negative or not finite");
    }
    return CostFunction(Table{std::move(values), beyond});
}

CostFunction CostFunction::from_function(std::function<double(State)> eval, std::string description,
                                         std::size_t horizon) {
    return CostFunction(Function{std::move(eval), std::move(description), horizon});
}

double CostFunction::raw(State i) const {
    return std::visit(
        overloaded{
            [](const Zero&) { return 0.0; },
            [i](const Geometric& g) {
                if (i == 0) return g.zero_at_origin ? 0.0 : g.scale;
                return g.scale * std::pow(g.ratio, static_cast<double>(i));
            },
            [i](const Indicator& ind) {
                return std::binary_search(ind.states.begin(), ind.states.end(), i) ? 1.0 : 0.0;
            },
            [i](const Table& t) { return i < t.values.size() ? t.values[i] : t.beyond; },
            [i](const Function& f) { return f.eval(i); },
        },
        repr_);
}

double CostFunction::operator()(State i) const {
    const double v = raw(i);
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError("cost c(" + std::to_string(i) + ") is negative or not finite");
    }
    return v;
}

std::vector<double> CostFunction::head(std::size_t count) const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = (*this)(i);
    return out;
}

std::size_t CostFunction::horizon() const {
    return std::visit(overloaded{
                          [](const Zero&) -> std::size_t { return 0; },
                          [](const Geometric& g) -> std::size_t { return g.zero_at_origin ? 1 : 0; },
                          [](const Indicator& ind) -> std::size_t {
                              return ind.states.empty() ? 0 : ind.states.back() + 1;
                          },
                          [](const Table& t) -> std::size_t { return t.values.size(); },
                          [](const Function& f) -> std::size_t { return f.horizon; },
                      },
                      repr_);
}

bool CostFunction::finite_support() const {
    return std::visit(overloaded{
                          [](const Zero&) { return true; },
                          [](const Geometric& g) { return g.scale == 0.0; },
                          [](const Indicator&) { return true; },
                          [](const Table& t) { return t.beyond == 0.0; },
                          [](const Function&) { return false; },
                      },
                      repr_);
}

bool CostFunction::is_zero() const {
    return std::visit(overloaded{
                          [](const Zero&) { return true; },
                          [](const Geometric& g) { return g.scale == 0.0; },
                          [](const Indicator& ind) { return ind.states.empty(); },
                          [](const Table& t) {
                              return t.beyond == 0.0 &&
                                     std::all_of(t.values.begin(), t.values.end(),
                                                 [](double v) { return v == 0.0; });
                          },
                          [](const Function&) { return false; },
                      },
                      repr_);
}

std::string CostFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Zero&) { os << "zero"; },
                   [&](const Geometric& g) {
                       os << "geometric(ratio=" << g.ratio << ", scale=" << g.scale
                          << (g.zero_at_origin ? ", c(0)=0" : "") << ")";
                   },
                   [&](const Indicator& ind) {
                       os << "indicator{";
                       for (std::size_t k = 0; k < ind.states.size(); ++k) {
                           os << (k ? "," : "") << ind.states[k];
                       }
                       os << "}";
                   },
                   [&](const Table& t) {
                       os << "table(" << t.values.size() << " values, default " << t.beyond << ")";
                   },
                   [&](const Function& f) { os << f.description; },
               },
               repr_);
    return os.str();
}

} // namespace skipfree
