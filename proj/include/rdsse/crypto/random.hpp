#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>

namespace rdsse::crypto {

/// Fills `out` from the OS-backed CSPRNG. Throws kCrypto on failure.
void random_bytes(std::span<std::uint8_t> out);

/// Uniform in [0, bound).
mpz_class random_below(const mpz_class& bound);

/// Uniform in Z_n^* (1 <= r < n, gcd(r, n) = 1).
mpz_class random_unit(const mpz_class& n);

/// Random prime of exactly `bits` bits with the two top bits set, so the
/// product of two such primes has exactly 2*bits bits.
mpz_class random_prime(unsigned bits);

}  // namespace rdsse::crypto
