#include "rdsse/crypto/tdp.hpp"

#include <string>

#include "rdsse/crypto/bigint.hpp"
#include "rdsse/crypto/random.hpp"
#include "rdsse/error.hpp"

namespace rdsse::crypto {

namespace {

constexpr unsigned long kPublicExponent = 65537;

}  // namespace

std::size_t TdpPublicKey::token_width() const { return byte_width(modulus); }

TdpKeypair TdpKeypair::from_primes(const mpz_class& p, const mpz_class& q, const mpz_class& e) {
    if (p == q) throw Error(ErrorCode::kCrypto, "TDP primes must differ");
    mpz_class phi = (p - 1) * (q - 1);
    TdpKeypair keys;
    keys.pub.modulus = p * q;
    keys.pub.exponent = e;
    keys.sec.p = p;
    keys.sec.q = q;
    if (mpz_invert(keys.sec.d.get_mpz_t(), e.get_mpz_t(), phi.get_mpz_t()) == 0) {
        throw Error(ErrorCode::kCrypto, "public exponent not invertible mod phi(N)");
    }
    keys.sec.dp = keys.sec.d % (p - 1);
    keys.sec.dq = keys.sec.d % (q - 1);
    if (mpz_invert(keys.sec.q_inv.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t()) == 0) {
        throw Error(ErrorCode::kCrypto, "q not invertible mod p");
    }
    return keys;
}

TdpKeypair TdpKeypair::generate(unsigned bits) {
    if (bits < 64 || bits % 2 != 0) {
        throw Error(ErrorCode::kInvalidArgument, "TDP modulus bits must be even and >= 64");
    }
    const mpz_class e{kPublicExponent};
    for (;;) {
        mpz_class p = random_prime(bits / 2);
        mpz_class q = random_prime(bits / 2);
        if (p == q) continue;
        mpz_class g;
        mpz_class phi = (p - 1) * (q - 1);
        mpz_gcd(g.get_mpz_t(), e.get_mpz_t(), phi.get_mpz_t());
        if (g != 1) continue;
        return from_primes(p, q, e);
    }
}

SearchToken encode_token(const TdpPublicKey& pub, const mpz_class& x) {
    return SearchToken{to_fixed_bytes(x, pub.token_width())};
}

mpz_class decode_token(const TdpPublicKey& pub, const SearchToken& st) {
    if (st.bytes.size() != pub.token_width()) {
        throw Error(ErrorCode::kMalformed, "search token width " + std::to_string(st.bytes.size()) +
                                               " != " + std::to_string(pub.token_width()));
    }
    mpz_class x = from_bytes(st.bytes);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), pub.modulus.get_mpz_t());
    if (x <= 0 || x >= pub.modulus || g != 1) {
        throw Error(ErrorCode::kOutOfRange, "search token outside the permutation domain");
    }
    return x;
}

SearchToken tdp_forward(const TdpPublicKey& pub, const SearchToken& x) {
    mpz_class v = decode_token(pub, x);
    mpz_class y;
    mpz_powm(y.get_mpz_t(), v.get_mpz_t(), pub.exponent.get_mpz_t(), pub.modulus.get_mpz_t());
    return encode_token(pub, y);
}

SearchToken tdp_inverse(const TdpKeypair& keys, const SearchToken& y) {
    mpz_class v = decode_token(keys.pub, y);
    const auto& s = keys.sec;
    mpz_class mp, mq;
    mpz_class vp = v % s.p;
    mpz_class vq = v % s.q;
    mpz_powm(mp.get_mpz_t(), vp.get_mpz_t(), s.dp.get_mpz_t(), s.p.get_mpz_t());
    mpz_powm(mq.get_mpz_t(), vq.get_mpz_t(), s.dq.get_mpz_t(), s.q.get_mpz_t());
    // Garner recombination
    mpz_class h = (s.q_inv * (mp - mq)) % s.p;
    if (h < 0) h += s.p;
    return encode_token(keys.pub, mq + h * s.q);
}

SearchToken tdp_sample(const TdpPublicKey& pub) { return encode_token(pub, random_unit(pub.modulus)); }

}  // namespace rdsse::crypto
