#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>

#include "rdsse/bytes.hpp"

namespace rdsse::crypto {

inline constexpr unsigned kDefaultPaillierBits = 2048;
inline constexpr unsigned kTestPaillierBits = 512;

/// Paillier public key with g fixed to n + 1.
struct PaillierPublicKey {
    mpz_class n;
    mpz_class n_squared;

    static PaillierPublicKey from_modulus(const mpz_class& n);
    /// Fixed ciphertext encoding width, ceil(|n^2| / 8) bytes.
    std::size_t ciphertext_width() const;

    friend bool operator==(const PaillierPublicKey&, const PaillierPublicKey&) = default;
};

struct PaillierSecretKey {
    mpz_class p;
    mpz_class q;
    mpz_class beta;  // phi(n)
    mpz_class mu;    // phi(n)^-1 mod n
};

struct PaillierKeypair {
    PaillierPublicKey pub;
    PaillierSecretKey sec;

    static PaillierKeypair generate(unsigned bits = kDefaultPaillierBits);
    static PaillierKeypair from_primes(const mpz_class& p, const mpz_class& q);
};

/// c = (1 + m n) r^n mod n^2. `r` is drawn from Z_n^* when omitted.
mpz_class paillier_enc(const PaillierPublicKey& pub, const mpz_class& m,
                       std::optional<mpz_class> r = std::nullopt);
/// m = L(c^beta mod n^2) mu mod n with L(x) = (x - 1) / n.
mpz_class paillier_dec(const PaillierKeypair& keys, const mpz_class& c);
/// Homomorphic addition: c1 c2 mod n^2.
mpz_class paillier_add(const PaillierPublicKey& pub, const mpz_class& c1, const mpz_class& c2);

/// Throws kMalformed unless 0 < c < n^2 and gcd(c, n) = 1.
void check_ciphertext(const PaillierPublicKey& pub, const mpz_class& c);

Bytes encode_ciphertext(const PaillierPublicKey& pub, const mpz_class& c);
mpz_class decode_ciphertext(const PaillierPublicKey& pub, ByteView data);

}  // namespace rdsse::crypto
