#include "bfree/error.hpp"

namespace bfree {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DuplicateModulus: return "DuplicateModulus";
    case ErrorCode::ModulusTooSmall: return "ModulusTooSmall";
    case ErrorCode::EmptyModuli: return "EmptyModuli";
    case ErrorCode::UnknownTail: return "UnknownTail";
    case ErrorCode::LevelExceedsModuli: return "LevelExceedsModuli";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::IncompatibleResidues: return "IncompatibleResidues";
    case ErrorCode::WindowNotProper: return "WindowNotProper";
    case ErrorCode::InvalidResidue: return "InvalidResidue";
    case ErrorCode::LcmOverflow: return "LcmOverflow";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::ExponentialBlowup: return "ExponentialBlowup";
    case ErrorCode::TailNotEnumerable: return "TailNotEnumerable";
    case ErrorCode::CenterOutOfRange: return "CenterOutOfRange";
    case ErrorCode::EmptyPattern: return "EmptyPattern";
    case ErrorCode::BlockExceedsLevel: return "BlockExceedsLevel";
    case ErrorCode::RationalRotation: return "RationalRotation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace bfree
