// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "skipfree/cost.hpp"
#include "skipfree/kernel.hpp"

namespace skipfree {

/// A chain described by a JSON specification file:
///
///   {"family": "gim1", "params": {"z": 3},
///    "cost": {"kind": "geometric", "ratio": 0.3333, "scale": 1, "zero_at_origin": false}}
///
/// Families: gim1 {z}, mg1 {z}, birth_death {lambda, mu} or {birth: [...], death: [...]},
/// finite_matrix / finite_generator {path} (CSV, relative to the spec file).
/// Cost kinds: geometric {ratio, scale, zero_at_origin}, indicator {states},
/// table {values, default}, zero. Parameters may sit in the cost object itself
/// or in cost.params. Without a cost the family default is used: the example
/// costs for gim1 and mg1, indicator(0) for birth_death; finite families
/// require an explicit cost.
struct ChainSpec {
    std::string family;
    std::shared_ptr<const TransitionKernel> kernel;    // discrete-time families
    std::shared_ptr<const GeneratorKernel> generator;  // continuous-time families
    CostFunction cost;
    bool default_cost = false;

    std::optional<double> z;       // gim1 / mg1
    std::optional<double> lambda;  // constant-rate birth_death
    std::optional<double> mu;

    std::string source;  // the parsed document, compact JSON

    bool continuous_time() const noexcept { return generator != nullptr; }
    const RowMatrix& matrix() const;
    std::string describe() const;
};

/// Throws FormatError on malformed documents or unknown keys' values.
ChainSpec parse_spec(const std::string& text, const std::filesystem::path& base_dir = {});
ChainSpec load_spec(const std::filesystem::path& path);

/// The cost object of a spec document, given as JSON text.
CostFunction parse_cost(const std::string& text);

} // namespace skipfree
