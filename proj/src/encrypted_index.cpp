#include "rdsse/encrypted_index.hpp"

#include <mutex>
#include <string>

#include "rdsse/crypto/bigint.hpp"
#include "rdsse/error.hpp"

namespace rdsse {

std::size_t PublicParams::payload_width() const {
    return scheme == Scheme::kA ? id_length : paillier.ciphertext_width();
}

Bytes PublicParams::encode() const {
    Bytes out;
    put_u8(out, static_cast<std::uint8_t>(scheme));
    if (scheme == Scheme::kA) {
        put_blob(out, crypto::to_bytes(tdp.modulus));
        put_blob(out, crypto::to_bytes(tdp.exponent));
        put_u32(out, id_length);
    } else {
        put_blob(out, crypto::to_bytes(paillier.n));
        put_u32(out, mask_width);
    }
    return out;
}

PublicParams PublicParams::decode(ByteView data) {
    ByteReader in(data);
    PublicParams p;
    auto tag = in.u8();
    if (tag == static_cast<std::uint8_t>(Scheme::kA)) {
        p.scheme = Scheme::kA;
        p.tdp.modulus = crypto::from_bytes(in.blob());
        p.tdp.exponent = crypto::from_bytes(in.blob());
        p.id_length = in.u32();
        if (p.id_length != kDocIdSize) {
            throw Error(ErrorCode::kMalformed, "unsupported id length " + std::to_string(p.id_length));
        }
    } else if (tag == static_cast<std::uint8_t>(Scheme::kB)) {
        p.scheme = Scheme::kB;
        p.paillier = crypto::PaillierPublicKey::from_modulus(crypto::from_bytes(in.blob()));
        p.mask_width = in.u32();
    } else {
        throw Error(ErrorCode::kMalformed, "unknown scheme tag in params");
    }
    if (!in.done()) throw Error(ErrorCode::kMalformed, "trailing bytes after params");
    return p;
}

std::optional<PublicParams> EncryptedIndex::params() const {
    std::shared_lock lock(mutex_);
    return params_;
}

void EncryptedIndex::set_params(const PublicParams& params) {
    std::unique_lock lock(mutex_);
    if (params.scheme != scheme_) {
        throw Error(ErrorCode::kSchemeMismatch, "params for scheme " +
                                                    std::string(scheme_name(params.scheme)) +
                                                    " sent to a scheme " +
                                                    std::string(scheme_name(scheme_)) + " store");
    }
    if (params_) {
        if (*params_ != params) {
            throw Error(ErrorCode::kSchemeMismatch, "store already bound to different public parameters");
        }
        return;
    }
    if (journal_ != nullptr) journal_->record_params(params);
    params_ = params;
}

std::optional<Bytes> EncryptedIndex::find(const Token& token) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(token);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool EncryptedIndex::contains(const Token& token) const {
    std::shared_lock lock(mutex_);
    return entries_.contains(token);
}

std::size_t EncryptedIndex::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::map<Token, Bytes> EncryptedIndex::entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

void EncryptedIndex::check_width(ByteView payload) const {
    if (params_ && payload.size() != params_->payload_width()) {
        throw Error(ErrorCode::kMalformed, "payload width " + std::to_string(payload.size()) +
                                               " != store width " +
                                               std::to_string(params_->payload_width()));
    }
}

void EncryptedIndex::put_locked(const Token& token, Bytes payload) {
    check_width(payload);
    if (journal_ != nullptr) journal_->record_put(token, payload);
    entries_[token] = std::move(payload);
}

void EncryptedIndex::insert_unique(const Token& token, Bytes payload) {
    std::unique_lock lock(mutex_);
    if (entries_.contains(token)) {
        throw Error(ErrorCode::kDuplicateToken, "update token already present: " + to_hex(view(token)));
    }
    put_locked(token, std::move(payload));
}

void EncryptedIndex::mutate(const Token& token,
                            const std::function<Bytes(const std::optional<Bytes>&)>& fn) {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(token);
    std::optional<Bytes> current;
    if (it != entries_.end()) current = it->second;
    put_locked(token, fn(current));
}

bool EncryptedIndex::copy(const Token& src, const Token& dst) {
    std::unique_lock lock(mutex_);
    if (entries_.contains(dst)) {
        throw Error(ErrorCode::kDestinationExists, "copy destination already present: " + to_hex(view(dst)));
    }
    auto it = entries_.find(src);
    if (it == entries_.end()) return false;
    put_locked(dst, it->second);
    return true;
}

void EncryptedIndex::restore(std::optional<PublicParams> params, std::map<Token, Bytes> entries) {
    std::unique_lock lock(mutex_);
    params_ = std::move(params);
    entries_ = std::move(entries);
}

void EncryptedIndex::set_journal(IndexJournal* journal) {
    std::unique_lock lock(mutex_);
    journal_ = journal;
}

}  // namespace rdsse
