#include "rdsse/crypto/bigint.hpp"

#include <string>

#include "rdsse/error.hpp"

namespace rdsse::crypto {

std::size_t bit_length(const mpz_class& value) {
    if (value == 0) return 0;
    return mpz_sizeinbase(value.get_mpz_t(), 2);
}

std::size_t byte_width(const mpz_class& modulus) { return (bit_length(modulus) + 7) / 8; }

Bytes to_bytes(const mpz_class& value) {
    if (value < 0) throw Error(ErrorCode::kInvalidArgument, "negative big integer");
    Bytes out(byte_width(value));
    std::size_t written = 0;
    if (!out.empty()) {
        mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
    }
    out.resize(written);
    return out;
}

Bytes to_fixed_bytes(const mpz_class& value, std::size_t width) {
    Bytes raw = to_bytes(value);
    if (raw.size() > width) {
        throw Error(ErrorCode::kOutOfRange, "integer needs " + std::to_string(raw.size()) +
                                                " bytes, width is " + std::to_string(width));
    }
    Bytes out(width - raw.size(), 0);
    out.insert(out.end(), raw.begin(), raw.end());
    return out;
}

mpz_class from_bytes(ByteView data) {
    mpz_class out;
    if (!data.empty()) {
        mpz_import(out.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
    }
    return out;
}

}  // namespace rdsse::crypto
