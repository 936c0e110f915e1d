#pragma once

#include <gmpxx.h>

#include <cstddef>

#include "rdsse/bytes.hpp"

namespace rdsse::crypto {

/// Big-endian magnitude, zero-padded on the left to exactly `width` bytes.
/// Throws kOutOfRange if the value does not fit.
Bytes to_fixed_bytes(const mpz_class& value, std::size_t width);
Bytes to_bytes(const mpz_class& value);
mpz_class from_bytes(ByteView data);

std::size_t byte_width(const mpz_class& modulus);
std::size_t bit_length(const mpz_class& value);

}  // namespace rdsse::crypto
