#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bfree {

enum class ErrorCode {
    DuplicateModulus,
    ModulusTooSmall,
    EmptyModuli,
    UnknownTail,
    LevelExceedsModuli,
    LevelMismatch,
    IncompatibleResidues,
    WindowNotProper,
    InvalidResidue,
    LcmOverflow,
    NotCoprime,
    ExponentialBlowup,
    TailNotEnumerable,
    CenterOutOfRange,
    EmptyPattern,
    BlockExceedsLevel,
    RationalRotation,
    InvalidArgument,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a machine-readable code. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

} // namespace bfree
