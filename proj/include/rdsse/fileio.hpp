#pragma once

#include <filesystem>

#include "rdsse/bytes.hpp"

namespace rdsse::fileio {

std::uint32_t crc32_of(ByteView data);

/// Writes `data` to a 0600 temporary next to `path`, then renames it over
/// `path`. With `sync`, the file and its directory are fsynced.
void atomic_write(const std::filesystem::path& path, ByteView data, bool sync = true);

Bytes read_file(const std::filesystem::path& path);

void write_all(int fd, ByteView data);
void sync_directory(const std::filesystem::path& dir);

}  // namespace rdsse::fileio
