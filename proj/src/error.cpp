#include "rdsse/error.hpp"

namespace rdsse {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "invalid_argument";
        case ErrorCode::kOutOfRange: return "out_of_range";
        case ErrorCode::kPrecondition: return "precondition";
        case ErrorCode::kCapacityExhausted: return "capacity_exhausted";
        case ErrorCode::kDuplicateToken: return "duplicate_token";
        case ErrorCode::kDestinationExists: return "destination_exists";
        case ErrorCode::kMalformed: return "malformed";
        case ErrorCode::kSchemeMismatch: return "scheme_mismatch";
        case ErrorCode::kChecksumMismatch: return "checksum_mismatch";
        case ErrorCode::kIo: return "io";
        case ErrorCode::kProtocol: return "protocol";
        case ErrorCode::kUnsupported: return "unsupported";
        case ErrorCode::kCrypto: return "crypto";
    }
    return "unknown";
}

}  // namespace rdsse
