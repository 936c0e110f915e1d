#include "rdsse/crypto/paillier.hpp"

#include <string>

#include "rdsse/crypto/bigint.hpp"
#include "rdsse/crypto/random.hpp"
#include "rdsse/error.hpp"

namespace rdsse::crypto {

PaillierPublicKey PaillierPublicKey::from_modulus(const mpz_class& n) {
    if (n <= 1) throw Error(ErrorCode::kInvalidArgument, "Paillier modulus must exceed 1");
    return PaillierPublicKey{n, n * n};
}

std::size_t PaillierPublicKey::ciphertext_width() const { return byte_width(n_squared); }

PaillierKeypair PaillierKeypair::from_primes(const mpz_class& p, const mpz_class& q) {
    if (p == q) throw Error(ErrorCode::kCrypto, "Paillier primes must differ");
    PaillierKeypair keys;
    keys.pub = PaillierPublicKey::from_modulus(p * q);
    keys.sec.p = p;
    keys.sec.q = q;
    keys.sec.beta = (p - 1) * (q - 1);
    if (mpz_invert(keys.sec.mu.get_mpz_t(), keys.sec.beta.get_mpz_t(), keys.pub.n.get_mpz_t()) == 0) {
        throw Error(ErrorCode::kCrypto, "phi(n) not invertible mod n");
    }
    return keys;
}

PaillierKeypair PaillierKeypair::generate(unsigned bits) {
    if (bits < 64 || bits % 2 != 0) {
        throw Error(ErrorCode::kInvalidArgument, "Paillier modulus bits must be even and >= 64");
    }
    for (;;) {
        mpz_class p = random_prime(bits / 2);
        mpz_class q = random_prime(bits / 2);
        if (p == q) continue;
        mpz_class n = p * q;
        mpz_class phi = (p - 1) * (q - 1);
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
        if (g != 1) continue;
        return from_primes(p, q);
    }
}

mpz_class paillier_enc(const PaillierPublicKey& pub, const mpz_class& m, std::optional<mpz_class> r) {
    if (m < 0 || m >= pub.n) {
        throw Error(ErrorCode::kOutOfRange, "Paillier plaintext outside [0, n)");
    }
    mpz_class rand = r ? *r : random_unit(pub.n);
    if (rand <= 0 || rand >= pub.n) {
        throw Error(ErrorCode::kOutOfRange, "Paillier randomness outside Z_n");
    }
    mpz_class rn;
    mpz_powm(rn.get_mpz_t(), rand.get_mpz_t(), pub.n.get_mpz_t(), pub.n_squared.get_mpz_t());
    mpz_class gm = (1 + m * pub.n) % pub.n_squared;
    return (gm * rn) % pub.n_squared;
}

mpz_class paillier_dec(const PaillierKeypair& keys, const mpz_class& c) {
    check_ciphertext(keys.pub, c);
    mpz_class x;
    mpz_powm(x.get_mpz_t(), c.get_mpz_t(), keys.sec.beta.get_mpz_t(), keys.pub.n_squared.get_mpz_t());
    mpz_class l = (x - 1) / keys.pub.n;
    return (l * keys.sec.mu) % keys.pub.n;
}

mpz_class paillier_add(const PaillierPublicKey& pub, const mpz_class& c1, const mpz_class& c2) {
    check_ciphertext(pub, c1);
    check_ciphertext(pub, c2);
    return (c1 * c2) % pub.n_squared;
}

void check_ciphertext(const PaillierPublicKey& pub, const mpz_class& c) {
    if (c <= 0 || c >= pub.n_squared) {
        throw Error(ErrorCode::kMalformed, "ciphertext outside (0, n^2)");
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), pub.n.get_mpz_t());
    if (g != 1) throw Error(ErrorCode::kMalformed, "ciphertext shares a factor with n");
}

Bytes encode_ciphertext(const PaillierPublicKey& pub, const mpz_class& c) {
    return to_fixed_bytes(c, pub.ciphertext_width());
}

mpz_class decode_ciphertext(const PaillierPublicKey& pub, ByteView data) {
    if (data.size() != pub.ciphertext_width()) {
        throw Error(ErrorCode::kMalformed, "ciphertext width " + std::to_string(data.size()) +
                                               " != " + std::to_string(pub.ciphertext_width()));
    }
    mpz_class c = from_bytes(data);
    check_ciphertext(pub, c);
    return c;
}

}  // namespace rdsse::crypto
