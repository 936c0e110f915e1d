#include "rdsse/bytes.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>

#include "rdsse/error.hpp"

namespace rdsse {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw Error(ErrorCode::kMalformed, "odd-length hex string");
    }
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw Error(ErrorCode::kMalformed, "invalid hex digit");
        }
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string base64_encode(ByteView data) {
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            data.data(), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

Bytes base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) {
        throw Error(ErrorCode::kMalformed, "base64 length not a multiple of 4");
    }
    if (text.empty()) return {};
    Bytes out(3 * text.size() / 4);
    int n = EVP_DecodeBlock(out.data(),
                            reinterpret_cast<const unsigned char*>(text.data()),
                            static_cast<int>(text.size()));
    if (n < 0) {
        throw Error(ErrorCode::kMalformed, "invalid base64");
    }
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
    std::size_t pad = 0;
    if (text.back() == '=') ++pad;
    if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

Token token_from(ByteView data) {
    if (data.size() != kTokenSize) {
        throw Error(ErrorCode::kMalformed,
                    "token must be 32 bytes, got " + std::to_string(data.size()));
    }
    Token t;
    std::copy(data.begin(), data.end(), t.begin());
    return t;
}

DocId doc_id_from(ByteView data) {
    if (data.size() != kDocIdSize) {
        throw Error(ErrorCode::kMalformed,
                    "document id must be 16 bytes, got " + std::to_string(data.size()));
    }
    DocId d;
    std::copy(data.begin(), data.end(), d.begin());
    return d;
}

DocId doc_id_from_name(std::string_view name) {
    if (name.empty() || name.size() > kDocIdSize) {
        throw Error(ErrorCode::kInvalidArgument,
                    "document name must be 1..16 bytes: '" + std::string(name) + "'");
    }
    DocId d{};
    std::copy(name.begin(), name.end(), d.begin());
    return d;
}

std::string doc_id_name(const DocId& id) {
    auto end = std::find(id.begin(), id.end(), std::uint8_t{0});
    bool printable = end != id.begin() &&
                     std::all_of(id.begin(), end, [](std::uint8_t c) { return std::isprint(c) != 0; }) &&
                     std::all_of(end, id.end(), [](std::uint8_t c) { return c == 0; });
    if (!printable) return to_hex(view(id));
    return std::string(id.begin(), end);
}

void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

void put_u32(Bytes& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_bytes(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

void put_blob(Bytes& out, ByteView data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    put_bytes(out, data);
}

std::uint8_t ByteReader::u8() { return bytes(1)[0]; }

std::uint32_t ByteReader::u32() {
    auto b = bytes(4);
    std::uint32_t v = 0;
    for (auto c : b) v = v << 8 | c;
    return v;
}

std::uint64_t ByteReader::u64() {
    auto b = bytes(8);
    std::uint64_t v = 0;
    for (auto c : b) v = v << 8 | c;
    return v;
}

ByteView ByteReader::bytes(std::size_t n) {
    if (n > remaining()) {
        throw Error(ErrorCode::kMalformed, "unexpected end of buffer");
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

ByteView ByteReader::blob() { return bytes(u32()); }

}  // namespace rdsse
