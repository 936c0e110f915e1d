#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdsse {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kTokenSize = 32;
inline constexpr std::size_t kDocIdSize = 16;

/// 32-byte PRF / hash output used as map key and per-node key.
using Token = std::array<std::uint8_t, kTokenSize>;

/// Fixed-width document identifier (16 bytes).
using DocId = std::array<std::uint8_t, kDocIdSize>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

std::string base64_encode(ByteView data);
Bytes base64_decode(std::string_view text);

inline ByteView view(const Token& t) { return {t.data(), t.size()}; }
inline ByteView view(const DocId& d) { return {d.data(), d.size()}; }
inline ByteView view(const Bytes& b) { return {b.data(), b.size()}; }

Token token_from(ByteView data);
DocId doc_id_from(ByteView data);

/// Packs a short name into a zero-padded DocId; names longer than 16 bytes
/// are rejected.
DocId doc_id_from_name(std::string_view name);
/// Inverse of doc_id_from_name for printable ids; falls back to hex.
std::string doc_id_name(const DocId& id);

void put_u8(Bytes& out, std::uint8_t v);
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
void put_bytes(Bytes& out, ByteView data);
/// u32 length prefix followed by the bytes.
void put_blob(Bytes& out, ByteView data);

/// Bounds-checked big-endian reader over a byte buffer.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    ByteView bytes(std::size_t n);
    ByteView blob();

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace rdsse
