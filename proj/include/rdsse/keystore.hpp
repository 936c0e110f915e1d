#pragma once

#include <filesystem>

#include "rdsse/config.hpp"
#include "rdsse/scheme_a.hpp"
#include "rdsse/scheme_b.hpp"

namespace rdsse::keystore {

// Client keystore layout (big-endian):
//   "RDSSEK" | version (1) | scheme tag (1) | body | u32 CRC32 of all above
// A body: prf key | blob p | blob q | blob e | u64 m | u32 nodes
//         { u64 label | u8 has_head | [blob head] | i64 counter
//           | u32 segments { u64 key_label | blob head | i64 from | i64 to } }
// B body: prf key | blob p | blob q | u32 y | u64 m | u32 docs
//         { doc id (16) | u32 slot | u64 value }
// The file holds every client secret; it is written 0600 and replaced
// atomically.

inline constexpr char kKeystoreMagic[] = "RDSSEK";
inline constexpr std::uint8_t kKeystoreVersion = 1;

Bytes encode_a(const scheme_a::ClientStateA& state);
scheme_a::ClientStateA decode_a(ByteView data);
Bytes encode_b(const scheme_b::ClientStateB& state);
scheme_b::ClientStateB decode_b(ByteView data);

/// Scheme recorded in a keystore file.
Scheme probe(const std::filesystem::path& path);

void save(const std::filesystem::path& path, const scheme_a::ClientStateA& state);
void save(const std::filesystem::path& path, const scheme_b::ClientStateB& state);
scheme_a::ClientStateA load_a(const std::filesystem::path& path);
scheme_b::ClientStateB load_b(const std::filesystem::path& path);

/// Atomic 0600 write via a temporary file and rename.
void write_private_file(const std::filesystem::path& path, ByteView data);
Bytes read_file(const std::filesystem::path& path);

}  // namespace rdsse::keystore
