#pragma once

// Exception hierarchy shared by all cfc modules.

#include <stdexcept>
#include <string>

namespace cfc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A state was constructed with the same mode label twice.
struct DuplicateLabel : Error {
    explicit DuplicateLabel(const std::string& label)
        : Error("duplicate mode label: " + label), label(label) {}
    std::string label;
};

/// Post-selection amplitude vanished; the conditional quantity is undefined.
struct ZeroPostSelection : Error {
    using Error::Error;
};

/// Bracketed root search exhausted its expansions without a sign change.
struct NoRootInBracket : Error {
    using Error::Error;
};

/// Pointer grid cannot hold the wavepacket plus its shift.
struct GridTooNarrow : Error {
    using Error::Error;
};

/// Both branches of a conditional probability have zero amplitude.
struct UndefinedConditional : Error {
    using Error::Error;
};

/// A precondition on operation inputs was violated.
struct DomainError : Error {
    using Error::Error;
};

/// An internal consistency check failed (maps to CLI exit code 4).
struct InvariantBreach : Error {
    using Error::Error;
};

/// Scenario text rejected; line and column are 1-based.
struct ParseError : Error {
    ParseError(int line, int column, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

}  // namespace cfc
