// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>

namespace skipfree {

using State = std::size_t;

inline constexpr State kNoLimit = std::numeric_limits<State>::max();

/// Structural class of a chain. Birth-death chains carry both skip-free bits.
enum class Structure : unsigned {
    General = 0,
    UpwardSkipFree = 1,
    DownwardSkipFree = 2,
    BirthDeath = 3,
};

constexpr bool is_upward(Structure s) noexcept {
    return (static_cast<unsigned>(s) & 1u) != 0;
}
constexpr bool is_downward(Structure s) noexcept {
    return (static_cast<unsigned>(s) & 2u) != 0;
}
constexpr Structure combine(bool upward, bool downward) noexcept {
    return static_cast<Structure>((upward ? 1u : 0u) | (downward ? 2u : 0u));
}

std::string_view to_string(Structure s) noexcept;

/// Finite(n_states) when engaged, countably infinite otherwise.
struct StateSpace {
    std::optional<std::size_t> n_states;

    static StateSpace finite(std::size_t n) { return StateSpace{n}; }
    static StateSpace countably_infinite() { return StateSpace{}; }

    bool is_finite() const noexcept { return n_states.has_value(); }
    bool contains(State i) const noexcept { return !n_states || i < *n_states; }
};

/// One nonzero of a sparse row.
struct Entry {
    State col;
    double value;
};

enum class Status {
    Converged,
    Diverged,
    IndexCapReached,
    Oscillating,
};

std::string_view to_string(Status s) noexcept;

/// A limit evaluated numerically, with the metadata of how it was obtained.
/// A diverged value is reported as +infinity.
struct ConvergentValue {
    double value = 0.0;
    Status status = Status::Converged;
    std::size_t terms_used = 0;
    double last_increment = 0.0;

    bool converged() const noexcept { return status == Status::Converged; }
};

enum class Verdict {
    Transient,
    Recurrent,
    Unknown,
};

std::string_view to_string(Verdict v) noexcept;

/// Outcome of a transience test together with the criterion value it rests on.
struct Classification {
    Verdict verdict = Verdict::Unknown;
    ConvergentValue criterion;
};

} // namespace skipfree
