#pragma once

#include <stdexcept>
#include <string>

namespace gtdp {

/// Argument outside the mathematical domain of an operation (bad q, k < 2, empty list).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exponent or population size beyond what a kernel/table was built for.
class CapacityError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Lookup of a state outside a finished table.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Caller broke an operation's precondition (e.g. x >= m for a defective split).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Requested build would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration requested beyond its size budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Outcome reported for a group the executor did not emit.
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Table file I/O, corruption or mismatch.
class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gtdp
