#pragma once

#include <array>
#include <cstdint>

#include "rdsse/bytes.hpp"
#include "rdsse/range_tree.hpp"

namespace rdsse::crypto {

inline constexpr std::size_t kPrfKeySize = 32;

/// Client-only PRF key. Never leaves the keystore.
struct PrfKey {
    std::array<std::uint8_t, kPrfKeySize> bytes{};

    static PrfKey generate();

    friend bool operator==(const PrfKey&, const PrfKey&) = default;
};

/// Context tags that separate the PRF's two uses.
enum class PrfDomain : std::uint8_t {
    kNodeKey = 0x10,      // K_n = F_K(n), keys H1/H2 in scheme A
    kUpdateToken = 0x20,  // UT_n = F_K(n), fixed map key in scheme B
};

Token prf_eval(const PrfKey& key, PrfDomain domain, NodeLabel label);

/// H1(K_n, st): update token under which a posting is stored.
Token h1(const Token& node_key, ByteView search_token);

/// H2(K_n, st): one-time pad for a 16-byte document id.
DocId h2(const Token& node_key, ByteView search_token);

DocId xor_pad(const DocId& id, const DocId& pad);

}  // namespace rdsse::crypto
