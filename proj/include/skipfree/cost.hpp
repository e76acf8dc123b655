// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "skipfree/types.hpp"

namespace skipfree {

/// Finite nonnegative forcing function c on the state space.
///
/// Either closed-form (geometric, indicator, zero, arbitrary evaluator) or a
/// table with an explicit default beyond its end. Every evaluation checks
/// c(i) >= 0 and finiteness and throws DomainError otherwise.
class CostFunction {
public:
    /// c(i) = scale * ratio^i, with c(0) forced to 0 when zero_at_origin.
    struct Geometric {
        double ratio = 1.0;
        double scale = 1.0;
        bool zero_at_origin = false;
    };
    struct Indicator {
        std::vector<State> states;  // sorted, unique
    };
    struct Table {
        std::vector<double> values;
        double beyond = 0.0;
    };
    struct Zero {};
    struct Function {
        std::function<double(State)> eval;
        std::string description;
        std::size_t horizon = 0;
    };

    CostFunction() : repr_(Zero{}) {}

    static CostFunction zero() { return CostFunction(Zero{}); }
    static CostFunction constant(double value) { return geometric(1.0, value); }
    static CostFunction geometric(double ratio, double scale = 1.0, bool zero_at_origin = false);
    static CostFunction indicator(std::vector<State> states);
    static CostFunction table(std::vector<double> values, double beyond = 0.0);
    /// `horizon` is what horizon() reports for the evaluator.
    static CostFunction from_function(std::function<double(State)> eval, std::string description,
                                      std::size_t horizon = 0);

    double operator()(State i) const;

    /// (c(0), ..., c(count-1)).
    std::vector<double> head(std::size_t count) const;

    /// First index past which the cost follows its closed-form tail rule. Series
    /// evaluators never declare convergence before reaching it.
    std::size_t horizon() const;

    bool is_zero() const;
    /// True when c(i) = 0 for every i >= horizon().
    bool finite_support() const;
    const Geometric* as_geometric() const { return std::get_if<Geometric>(&repr_); }
    const Indicator* as_indicator() const { return std::get_if<Indicator>(&repr_); }
    std::string describe() const;

private:
    using Repr = std::variant<Zero, Geometric, Indicator, Table, Function>;
    explicit CostFunction(Repr r) : repr_(std::move(r)) {}

    double raw(State i) const;

    Repr repr_;
};

} // namespace skipfree
