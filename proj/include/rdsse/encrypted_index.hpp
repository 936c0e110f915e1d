#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>

#include "rdsse/bytes.hpp"
#include "rdsse/config.hpp"

namespace rdsse {

/// Public parameters the server needs: the TDP public key for scheme A, the
/// Paillier public key and mask width for scheme B. Nothing secret.
struct PublicParams {
    Scheme scheme = Scheme::kA;
    crypto::TdpPublicKey tdp;            // scheme A
    std::uint32_t id_length = kDocIdSize;  // scheme A
    crypto::PaillierPublicKey paillier;  // scheme B
    std::uint32_t mask_width = 0;        // scheme B

    std::size_t payload_width() const;

    Bytes encode() const;
    static PublicParams decode(ByteView data);

    friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

/// Receives every mutation while the index's write lock is held.
class IndexJournal {
public:
    virtual ~IndexJournal() = default;
    virtual void record_params(const PublicParams& params) = 0;
    virtual void record_put(const Token& token, ByteView payload) = 0;
};

/// Server map T from update tokens to payloads. Single writer, many readers.
class EncryptedIndex {
public:
    explicit EncryptedIndex(Scheme scheme) : scheme_(scheme) {}

    EncryptedIndex(const EncryptedIndex&) = delete;
    EncryptedIndex& operator=(const EncryptedIndex&) = delete;

    Scheme scheme() const { return scheme_; }

    std::optional<PublicParams> params() const;
    /// Installs params on a fresh index; re-installing identical params is a
    /// no-op, different params are a kSchemeMismatch.
    void set_params(const PublicParams& params);

    std::optional<Bytes> find(const Token& token) const;
    bool contains(const Token& token) const;
    std::size_t size() const;
    std::map<Token, Bytes> entries() const;

    /// Throws kDuplicateToken if the token is present.
    void insert_unique(const Token& token, Bytes payload);

    /// Atomic read-modify-write of one entry: `fn` sees the current payload (if
    /// any) and returns the new one.
    void mutate(const Token& token, const std::function<Bytes(const std::optional<Bytes>&)>& fn);

    /// dst := src if src exists. Throws kDestinationExists if dst exists.
    /// Returns whether anything was copied.
    bool copy(const Token& src, const Token& dst);

    /// Bulk load used by persistence; bypasses the journal.
    void restore(std::optional<PublicParams> params, std::map<Token, Bytes> entries);

    void set_journal(IndexJournal* journal);

    void add_anomalies(std::uint64_t n) { anomalies_ += n; }
    std::uint64_t anomalies() const { return anomalies_.load(); }

private:
    void check_width(ByteView payload) const;
    void put_locked(const Token& token, Bytes payload);

    Scheme scheme_;
    mutable std::shared_mutex mutex_;
    std::optional<PublicParams> params_;
    std::map<Token, Bytes> entries_;
    IndexJournal* journal_ = nullptr;
    std::atomic<std::uint64_t> anomalies_{0};
};

}  // namespace rdsse
