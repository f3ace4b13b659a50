#pragma once

#include <stdexcept>
#include <string>

namespace ucpc {

/// Invalid argument: dimension mismatch, k out of range, bad coverage, ...
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A continuous pdf whose box carries no probability mass.
class degenerate_support_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Rejection sampling gave up (pathological truncation).
class sampling_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation that needs at least one member was given an empty cluster.
class empty_cluster_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// stats_remove on zero-size statistics.
class underflow_error : public std::underflow_error {
public:
    using std::underflow_error::underflow_error;
};

/// Malformed input file (CSV/JSON) or inconsistent dataset contents.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumeration guard in the exhaustive oracle.
class guard_error : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace ucpc
