#pragma once

#include <cstdint>
#include <string_view>

#include "rdsse/bitstring.hpp"
#include "rdsse/crypto/paillier.hpp"
#include "rdsse/crypto/tdp.hpp"

namespace rdsse {

enum class Scheme : std::uint8_t {
    kA = 'A',  // forward-private token chains
    kB = 'B',  // backward-private Paillier accumulators
};

std::string_view scheme_name(Scheme s);
/// Accepts "a"/"A"/"b"/"B".
Scheme parse_scheme(std::string_view text);

struct SecurityConfig {
    unsigned tdp_bits = crypto::kDefaultTdpBits;
    unsigned paillier_bits = crypto::kDefaultPaillierBits;
    unsigned mask_width = bitstring::kDefaultMaskWidth;

    /// 512-bit moduli and a 480-bit mask: fast enough for large test sweeps.
    static SecurityConfig test_profile() { return {crypto::kTestTdpBits, crypto::kTestPaillierBits, 480}; }
};

}  // namespace rdsse
