#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arcfit {

/// Bad user input: malformed arcs, out-of-band data, unparsable files.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input error tied to a position in a list or file (sample index or line number).
class LocatedInputError : public InputError {
public:
    LocatedInputError(const std::string& what, std::size_t location)
        : InputError(what), location_(location) {}

    [[nodiscard]] std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

/// Raised when a Hermitian system is too close to singular to trust.
class ConditioningError : public std::runtime_error {
public:
    ConditioningError(const std::string& what, double relative_pivot)
        : std::runtime_error(what), relative_pivot_(relative_pivot) {}

    [[nodiscard]] double relative_pivot() const noexcept { return relative_pivot_; }

private:
    double relative_pivot_;
};

/// Something that must not happen for valid inputs (NaN, broken factorization).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace arcfit
