#include "somos/error.hpp"

namespace somos {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::GapPoint: return "GapPoint";
    case ErrorCode::UnsupportedBase: return "UnsupportedBase";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    }
    return "Unknown";
}

} // namespace somos
