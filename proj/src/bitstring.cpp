#include "rdsse/bitstring.hpp"

#include <string>

#include "rdsse/error.hpp"

namespace rdsse::bitstring {

namespace {

mpz_class pow2(unsigned e) {
    mpz_class out;
    mpz_setbit(out.get_mpz_t(), e);
    return out;
}

void check_slot(std::uint32_t slot, unsigned width) {
    if (width < 2 || slot > width - 2) {
        throw Error(ErrorCode::kOutOfRange, "slot " + std::to_string(slot) +
                                                " outside capacity of width " + std::to_string(width));
    }
}

}  // namespace

mpz_class encode_add(std::uint32_t slot, unsigned width) {
    check_slot(slot, width);
    return pow2(slot);
}

mpz_class encode_del(std::uint32_t slot, unsigned width) {
    check_slot(slot, width);
    return pow2(width) - pow2(slot);
}

std::set<std::uint32_t> decode(const mpz_class& accumulated, unsigned width) {
    std::set<std::uint32_t> slots;
    if (width < 2 || accumulated < 0) return slots;
    mpz_class low;
    mpz_fdiv_r_2exp(low.get_mpz_t(), accumulated.get_mpz_t(), width);
    for (mp_bitcnt_t bit = mpz_scan1(low.get_mpz_t(), 0); bit < width - 1;
         bit = mpz_scan1(low.get_mpz_t(), bit + 1)) {
        slots.insert(static_cast<std::uint32_t>(bit));
    }
    return slots;
}

mpz_class max_safe_updates(unsigned width, const mpz_class& modulus) {
    mpz_class mask = pow2(width);
    if (mask >= modulus) {
        throw Error(ErrorCode::kPrecondition,
                    "mask width " + std::to_string(width) + " does not fit below the modulus");
    }
    return (modulus - mask) / mask;
}

}  // namespace rdsse::bitstring
