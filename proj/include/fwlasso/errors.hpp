#pragma once

#include <stdexcept>
#include <string>

namespace fwlasso {

// Malformed input data (bad token, bad index, truncated file).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("parse error at line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Structurally inconsistent data (index out of bounds, length mismatch).
class DimensionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
    using std::logic_error::logic_error;
};

// A solver produced a non-finite intermediate or failed an internal audit.
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The reference solver could not certify its tolerance (test infrastructure
// failure, not a product error).
class OracleFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fwlasso
