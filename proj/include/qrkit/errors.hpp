#pragma once

#include <stdexcept>
#include <string>

namespace qrkit {

// Error taxonomy shared by every module. The CLI maps these onto its exit
// code contract: usage = 2, precondition = 3, invariant violation = 4.

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bounded search ran out of room. Existence is guaranteed by theory, so
// this always means the bound was too small, never that no answer exists.
class SearchExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal consistency check failed that should be impossible for valid
// inputs. These are reported loudly and never swallowed.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace qrkit
