#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdsse {

enum class ErrorCode {
    kInvalidArgument,
    kOutOfRange,
    kPrecondition,
    kCapacityExhausted,
    kDuplicateToken,
    kDestinationExists,
    kMalformed,
    kSchemeMismatch,
    kChecksumMismatch,
    kIo,
    kProtocol,
    kUnsupported,
    kCrypto,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Single exception type for the library; the code is stable and is what
/// crosses the wire in ERROR frames.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rdsse
