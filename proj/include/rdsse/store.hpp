#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>

#include "rdsse/bytes.hpp"
#include "rdsse/encrypted_index.hpp"

namespace rdsse {

// Store file layout (all integers big-endian):
//   "RDSSE1" | scheme tag (1) | u32 params length | params
//   | u64 entry count | { token (32) | u32 length | payload }*
//   | u32 CRC32 of everything above
//   | log records: { u32 length | u32 CRC32(body) | body }*
// A log body is 0x01 token payload (put) or 0x02 params (bind params).

inline constexpr char kStoreMagic[] = "RDSSE1";

struct StoreImage {
    Scheme scheme = Scheme::kA;
    std::optional<PublicParams> params;
    std::map<Token, Bytes> entries;
    std::size_t log_records = 0;
    bool dropped_tail = false;
    std::uint64_t valid_length = 0;  // bytes up to the last intact record
};

/// Parses a store file. A truncated trailing record is dropped; any checksum
/// mismatch is a kChecksumMismatch error.
StoreImage read_store(const std::filesystem::path& path);

/// Atomically replaces `path` with a snapshot and an empty log.
void write_snapshot(const std::filesystem::path& path, Scheme scheme,
                    const std::optional<PublicParams>& params, const std::map<Token, Bytes>& entries,
                    bool sync = true);

struct StoreOptions {
    std::size_t snapshot_every = 1000;  // compact after this many log records; 0 = never
    bool sync = true;                   // fdatasync each record before acknowledging
};

/// Durable EncryptedIndex: every mutation is appended to the log (and synced)
/// before the in-memory map changes.
class IndexStore final : public IndexJournal {
public:
    /// Creates a fresh store or loads an existing one. Throws kSchemeMismatch
    /// when the file belongs to the other scheme.
    static std::unique_ptr<IndexStore> open(const std::filesystem::path& path, Scheme scheme,
                                            StoreOptions options = {});

    ~IndexStore() override;
    IndexStore(const IndexStore&) = delete;
    IndexStore& operator=(const IndexStore&) = delete;

    EncryptedIndex& index() { return *index_; }
    const std::filesystem::path& path() const { return path_; }
    std::size_t log_records() const { return log_records_; }
    bool recovered_dropped_tail() const { return dropped_tail_; }

    /// Rewrites the file as a fresh snapshot.
    void compact();
    /// Compacts if the log has reached `snapshot_every` records. Call after a
    /// mutation, outside the index lock.
    bool maybe_compact();

    void record_params(const PublicParams& params) override;
    void record_put(const Token& token, ByteView payload) override;

private:
    IndexStore(std::filesystem::path path, Scheme scheme, StoreOptions options);
    void append_record(const Bytes& body);
    void reopen_log();
    void close_log();

    std::filesystem::path path_;
    StoreOptions options_;
    std::unique_ptr<EncryptedIndex> index_;
    int fd_ = -1;
    std::size_t log_records_ = 0;
    bool dropped_tail_ = false;
    bool compact_pending_ = false;
};

}  // namespace rdsse
