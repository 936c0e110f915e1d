#pragma once

#include <gmpxx.h>

#include <cstddef>

#include "rdsse/bytes.hpp"

namespace rdsse::crypto {

inline constexpr unsigned kDefaultTdpBits = 2048;
inline constexpr unsigned kTestTdpBits = 512;

/// RSA-style trapdoor permutation over Z_N^*: forward is x^e, inverse x^d.
struct TdpPublicKey {
    mpz_class modulus;
    mpz_class exponent;

    /// Width of every encoded search token.
    std::size_t token_width() const;

    friend bool operator==(const TdpPublicKey&, const TdpPublicKey&) = default;
};

struct TdpSecretKey {
    mpz_class p;
    mpz_class q;
    mpz_class d;
    // CRT components
    mpz_class dp;
    mpz_class dq;
    mpz_class q_inv;

    friend bool operator==(const TdpSecretKey&, const TdpSecretKey&) = default;
};

struct TdpKeypair {
    TdpPublicKey pub;
    TdpSecretKey sec;

    static TdpKeypair generate(unsigned bits = kDefaultTdpBits);
    /// Rebuilds the full keypair from the two primes (used by the keystore).
    static TdpKeypair from_primes(const mpz_class& p, const mpz_class& q, const mpz_class& e);
};

/// Element of the TDP domain in fixed-width big-endian encoding.
struct SearchToken {
    Bytes bytes;

    friend bool operator==(const SearchToken&, const SearchToken&) = default;
    friend auto operator<=>(const SearchToken&, const SearchToken&) = default;
};

SearchToken encode_token(const TdpPublicKey& pub, const mpz_class& x);
/// Decodes and checks domain membership (width, 0 < x < N, gcd(x, N) = 1).
mpz_class decode_token(const TdpPublicKey& pub, const SearchToken& st);

SearchToken tdp_forward(const TdpPublicKey& pub, const SearchToken& x);
SearchToken tdp_inverse(const TdpKeypair& keys, const SearchToken& y);
SearchToken tdp_sample(const TdpPublicKey& pub);

}  // namespace rdsse::crypto
