#include "rdsse/crypto/prf.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>

#include "rdsse/crypto/random.hpp"
#include "rdsse/error.hpp"

namespace rdsse::crypto {

namespace {

constexpr std::uint8_t kH1Tag = 0x01;
constexpr std::uint8_t kH2Tag = 0x02;

Token hmac_sha256(ByteView key, std::uint8_t tag, ByteView msg) {
    Bytes input;
    input.reserve(msg.size() + 1);
    input.push_back(tag);
    input.insert(input.end(), msg.begin(), msg.end());
    Token out;
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), input.data(), input.size(),
             out.data(), &len) == nullptr ||
        len != out.size()) {
        throw Error(ErrorCode::kCrypto, "HMAC-SHA256 failed");
    }
    return out;
}

}  // namespace

PrfKey PrfKey::generate() {
    PrfKey k;
    random_bytes(k.bytes);
    return k;
}

Token prf_eval(const PrfKey& key, PrfDomain domain, NodeLabel label) {
    Bytes msg;
    put_u64(msg, label.value);
    return hmac_sha256({key.bytes.data(), key.bytes.size()}, static_cast<std::uint8_t>(domain), msg);
}

Token h1(const Token& node_key, ByteView search_token) {
    return hmac_sha256(view(node_key), kH1Tag, search_token);
}

DocId h2(const Token& node_key, ByteView search_token) {
    Token full = hmac_sha256(view(node_key), kH2Tag, search_token);
    DocId pad;
    std::copy_n(full.begin(), pad.size(), pad.begin());
    return pad;
}

DocId xor_pad(const DocId& id, const DocId& pad) {
    DocId out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = id[i] ^ pad[i];
    return out;
}

}  // namespace rdsse::crypto
