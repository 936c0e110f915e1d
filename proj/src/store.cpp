#include "rdsse/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "rdsse/error.hpp"
#include "rdsse/fileio.hpp"

namespace rdsse {

namespace {

constexpr std::uint8_t kRecordPut = 0x01;
constexpr std::uint8_t kRecordParams = 0x02;
constexpr std::size_t kMagicLen = sizeof(kStoreMagic) - 1;

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

using fileio::crc32_of;
using fileio::write_all;

Bytes read_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::kIo, "cannot open store " + path.string());
    return fileio::read_file(path);
}

void apply_record(StoreImage& image, ByteView body) {
    ByteReader in(body);
    auto kind = in.u8();
    if (kind == kRecordPut) {
        Token t = token_from(in.bytes(kTokenSize));
        auto rest = in.bytes(in.remaining());
        image.entries[t] = Bytes(rest.begin(), rest.end());
    } else if (kind == kRecordParams) {
        image.params = PublicParams::decode(in.bytes(in.remaining()));
    } else {
        throw Error(ErrorCode::kMalformed, "unknown log record kind " + std::to_string(kind));
    }
}

}  // namespace

StoreImage read_store(const std::filesystem::path& path) {
    Bytes data = read_file(path);
    ByteReader in(data);
    StoreImage image;
    try {
        auto magic = in.bytes(kMagicLen);
        if (std::memcmp(magic.data(), kStoreMagic, kMagicLen) != 0) {
            throw Error(ErrorCode::kMalformed, "not a store file (bad magic): " + path.string());
        }
        auto tag = in.u8();
        if (tag != static_cast<std::uint8_t>(Scheme::kA) && tag != static_cast<std::uint8_t>(Scheme::kB)) {
            throw Error(ErrorCode::kMalformed, "unknown scheme tag in store header");
        }
        image.scheme = static_cast<Scheme>(tag);
        auto params = in.blob();
        std::uint64_t count = in.u64();
        std::map<Token, Bytes> entries;
        for (std::uint64_t i = 0; i < count; ++i) {
            Token t = token_from(in.bytes(kTokenSize));
            auto payload = in.blob();
            entries.emplace(t, Bytes(payload.begin(), payload.end()));
        }
        std::size_t snapshot_end = in.position();
        std::uint32_t stored_crc = in.u32();
        if (crc32_of(ByteView(data).first(snapshot_end)) != stored_crc) {
            throw Error(ErrorCode::kChecksumMismatch, "snapshot checksum mismatch in " + path.string());
        }
        if (!params.empty()) image.params = PublicParams::decode(params);
        image.entries = std::move(entries);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kMalformed && std::string(e.what()) == "unexpected end of buffer") {
            throw Error(ErrorCode::kChecksumMismatch, "snapshot truncated in " + path.string());
        }
        throw;
    }
    image.valid_length = in.position();

    while (!in.done()) {
        if (in.remaining() < 8) {
            image.dropped_tail = true;
            break;
        }
        std::uint32_t len = in.u32();
        std::uint32_t crc = in.u32();
        if (len > in.remaining()) {
            image.dropped_tail = true;
            break;
        }
        auto body = in.bytes(len);
        if (crc32_of(body) != crc) {
            throw Error(ErrorCode::kChecksumMismatch,
                        "log record " + std::to_string(image.log_records) + " checksum mismatch in " +
                            path.string());
        }
        apply_record(image, body);
        ++image.log_records;
        image.valid_length = in.position();
    }
    return image;
}

void write_snapshot(const std::filesystem::path& path, Scheme scheme,
                    const std::optional<PublicParams>& params, const std::map<Token, Bytes>& entries,
                    bool sync) {
    Bytes out;
    put_bytes(out, ByteView(reinterpret_cast<const std::uint8_t*>(kStoreMagic), kMagicLen));
    put_u8(out, static_cast<std::uint8_t>(scheme));
    put_blob(out, params ? params->encode() : Bytes{});
    put_u64(out, entries.size());
    for (const auto& [token, payload] : entries) {
        put_bytes(out, view(token));
        put_blob(out, payload);
    }
    put_u32(out, crc32_of(out));

    fileio::atomic_write(path, out, sync);
}

IndexStore::IndexStore(std::filesystem::path path, Scheme scheme, StoreOptions options)
    : path_(std::move(path)), options_(options), index_(std::make_unique<EncryptedIndex>(scheme)) {}

std::unique_ptr<IndexStore> IndexStore::open(const std::filesystem::path& path, Scheme scheme,
                                             StoreOptions options) {
    std::unique_ptr<IndexStore> store(new IndexStore(path, scheme, options));
    if (std::filesystem::exists(path)) {
        StoreImage image = read_store(path);
        if (image.scheme != scheme) {
            throw Error(ErrorCode::kSchemeMismatch,
                        "store " + path.string() + " holds scheme " + std::string(scheme_name(image.scheme)));
        }
        store->index_->restore(image.params, std::move(image.entries));
        store->log_records_ = image.log_records;
        store->dropped_tail_ = image.dropped_tail;
        if (image.dropped_tail && ::truncate(path.c_str(), static_cast<off_t>(image.valid_length)) != 0) {
            throw_errno("truncate " + path.string());
        }
    } else {
        write_snapshot(path, scheme, std::nullopt, {}, options.sync);
    }
    store->reopen_log();
    store->index_->set_journal(store.get());
    return store;
}

IndexStore::~IndexStore() {
    index_->set_journal(nullptr);
    close_log();
}

void IndexStore::reopen_log() {
    close_log();
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (fd_ < 0) throw_errno("open " + path_.string());
}

void IndexStore::close_log() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void IndexStore::append_record(const Bytes& body) {
    Bytes rec;
    rec.reserve(body.size() + 8);
    put_u32(rec, static_cast<std::uint32_t>(body.size()));
    put_u32(rec, crc32_of(body));
    put_bytes(rec, body);
    write_all(fd_, rec);
    if (options_.sync && ::fdatasync(fd_) != 0) throw_errno("fdatasync " + path_.string());
    ++log_records_;
}

void IndexStore::record_params(const PublicParams& params) {
    Bytes body;
    put_u8(body, kRecordParams);
    put_bytes(body, params.encode());
    append_record(body);
}

void IndexStore::record_put(const Token& token, ByteView payload) {
    Bytes body;
    put_u8(body, kRecordPut);
    put_bytes(body, view(token));
    put_bytes(body, payload);
    append_record(body);
    if (options_.snapshot_every != 0 && log_records_ >= options_.snapshot_every) compact_pending_ = true;
}

bool IndexStore::maybe_compact() {
    if (!compact_pending_) return false;
    compact();
    return true;
}

void IndexStore::compact() {
    // Called without the index lock; entries()/params() take a shared lock.
    write_snapshot(path_, index_->scheme(), index_->params(), index_->entries(), options_.sync);
    log_records_ = 0;
    compact_pending_ = false;
    reopen_log();
}

}  // namespace rdsse
