#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace simpcert {

// Expression text that could not be parsed. `position` is the 0-based byte
// offset into the input where the parse failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Evaluation left the natural domain of the function: log/sqrt of an
// out-of-range argument, division by zero, power of a negative base with a
// non-integer exponent. `subexpression` is the offending source fragment.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& message, std::string subexpression)
        : std::runtime_error(subexpression.empty() ? message
                                                   : message + " in '" + subexpression + "'"),
          subexpression_(std::move(subexpression)) {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

// A numeric procedure could not meet its contract: extrapolation did not
// converge within the panel budget, a bracket search found no sign change,
// adaptive recursion hit its depth cap.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

// A proof-trace stage failed; `stage` names the stage.
class TraceError : public std::runtime_error {
public:
    TraceError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace simpcert
