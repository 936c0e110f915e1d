#include "rdsse/fileio.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rdsse/error.hpp"

namespace rdsse::fileio {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

}  // namespace

std::uint32_t crc32_of(ByteView data) {
    return static_cast<std::uint32_t>(
        ::crc32(::crc32(0L, Z_NULL, 0), data.data(), static_cast<uInt>(data.size())));
}

void write_all(int fd, ByteView data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("write");
        }
        off += static_cast<std::size_t>(n);
    }
}

void sync_directory(const std::filesystem::path& dir) {
    int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

void atomic_write(const std::filesystem::path& path, ByteView data, bool sync) {
    auto tmp = path;
    tmp += ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0) throw_errno("open " + tmp.string());
    try {
        write_all(fd, data);
        if (sync && ::fsync(fd) != 0) throw_errno("fsync " + tmp.string());
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    if (::rename(tmp.c_str(), path.c_str()) != 0) throw_errno("rename " + tmp.string());
    if (sync) sync_directory(path.parent_path());
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rdsse::fileio
