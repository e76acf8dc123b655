// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace skipfree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. k >= n for a prefix sum).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The kernel does not have the structure an algorithm relies on
/// (a zero P(n,n+1) in an upward recursion, an absorbing state, ...).
class StructureViolation : public Error {
public:
    using Error::Error;
};

/// The kernel cannot supply a quantity, typically a tail sum over an infinite row.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// The truncated system I - P_n (or -Q_n) is singular.
class SingularTruncation : public Error {
public:
    using Error::Error;
};

/// A closed form was requested outside the parameter regime where it holds.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A simulated replication failed to be absorbed within the step budget.
class RunawayError : public Error {
public:
    using Error::Error;
};

} // namespace skipfree
