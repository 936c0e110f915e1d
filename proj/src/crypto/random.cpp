#include "rdsse/crypto/random.hpp"

#include <openssl/rand.h>

#include "rdsse/crypto/bigint.hpp"
#include "rdsse/error.hpp"

namespace rdsse::crypto {

void random_bytes(std::span<std::uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw Error(ErrorCode::kCrypto, "RAND_bytes failed");
    }
}

mpz_class random_below(const mpz_class& bound) {
    if (bound <= 0) throw Error(ErrorCode::kInvalidArgument, "random bound must be positive");
    // Rejection sampling over the bit length of the bound.
    std::size_t bits = bit_length(bound);
    Bytes buf((bits + 7) / 8);
    unsigned excess = static_cast<unsigned>(buf.size() * 8 - bits);
    for (;;) {
        random_bytes(buf);
        buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
        mpz_class candidate = from_bytes(buf);
        if (candidate < bound) return candidate;
    }
}

mpz_class random_unit(const mpz_class& n) {
    for (;;) {
        mpz_class r = random_below(n);
        if (r == 0) continue;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
        if (g == 1) return r;
    }
}

mpz_class random_prime(unsigned bits) {
    if (bits < 16) throw Error(ErrorCode::kInvalidArgument, "prime size too small");
    Bytes buf((bits + 7) / 8);
    unsigned excess = static_cast<unsigned>(buf.size() * 8 - bits);
    for (;;) {
        random_bytes(buf);
        buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
        mpz_class candidate = from_bytes(buf);
        mpz_setbit(candidate.get_mpz_t(), bits - 1);
        mpz_setbit(candidate.get_mpz_t(), bits - 2);
        mpz_setbit(candidate.get_mpz_t(), 0);
        mpz_class p;
        mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
        if (bit_length(p) == bits) return p;
    }
}

}  // namespace rdsse::crypto
