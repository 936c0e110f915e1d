#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rdsse/bytes.hpp"
#include "rdsse/config.hpp"
#include "rdsse/crypto/paillier.hpp"
#include "rdsse/crypto/prf.hpp"
#include "rdsse/encrypted_index.hpp"
#include "rdsse/range_tree.hpp"

namespace rdsse::scheme_b {

enum class UpdateOp : std::uint8_t { kAdd = 1, kDel = 2 };

struct UpdateMessageB {
    Token ut;
    Bytes e;  // fixed-width Paillier ciphertext

    friend bool operator==(const UpdateMessageB&, const UpdateMessageB&) = default;
};

struct CopyMessage {
    Token src;
    Token dst;

    friend bool operator==(const CopyMessage&, const CopyMessage&) = default;
};

struct PathUpdateB {
    NodeLabel node;
    UpdateMessageB message;
};

struct CopyUpdateB {
    Doubling doubling;
    CopyMessage message;
};

struct UpdateBatchB {
    std::vector<CopyUpdateB> copies;
    std::vector<PathUpdateB> updates;
    std::uint32_t slot = 0;
};

struct CoverTokenB {
    NodeLabel node;
    Token ut;
};

/// Where a live document sits: its bit slot and its value.
struct Placement {
    std::uint32_t slot = 0;
    std::uint64_t value = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

/// Client-side slot <-> document mapping. Each document is live at no more
/// than one value, so a delete mask reaches every node holding its add mask
/// and the slot can be reused right away.
class DocDirectory {
public:
    explicit DocDirectory(unsigned mask_width = bitstring::kDefaultMaskWidth) : mask_width_(mask_width) {}

    std::size_t capacity() const { return mask_width_ - 1; }
    std::size_t live_count() const { return live_.size(); }
    std::optional<Placement> find(const DocId& id) const;
    std::optional<DocId> doc_at(std::uint32_t slot) const;
    const std::map<DocId, Placement>& live() const { return live_; }

    /// Claims the lowest free slot. Throws kCapacityExhausted.
    std::uint32_t place(const DocId& id, std::uint64_t value);
    void remove(const DocId& id);
    /// Reinstates a saved placement. Throws kMalformed on a clash.
    void restore(const DocId& id, Placement placement);

    friend bool operator==(const DocDirectory&, const DocDirectory&) = default;

private:
    unsigned mask_width_;
    std::map<DocId, Placement> live_;
    std::map<std::uint32_t, DocId> by_slot_;
};

class ClientStateB {
public:
    ClientStateB(crypto::PrfKey prf_key, crypto::PaillierKeypair paillier, unsigned mask_width,
                 TreeGeometry geo = {}, DocDirectory directory = DocDirectory{});

    const crypto::PrfKey& prf_key() const { return prf_key_; }
    const crypto::PaillierKeypair& paillier() const { return paillier_; }
    unsigned mask_width() const { return mask_width_; }
    const TreeGeometry& geometry() const { return geo_; }
    const DocDirectory& directory() const { return directory_; }
    DocDirectory& directory() { return directory_; }

    /// UT_n = F_K(n), fixed for the lifetime of the node.
    Token node_token(NodeLabel n) const;
    PublicParams public_params() const;

    std::vector<CopyUpdateB> grow_once();

private:
    crypto::PrfKey prf_key_;
    crypto::PaillierKeypair paillier_;
    unsigned mask_width_;
    TreeGeometry geo_;
    DocDirectory directory_;
};

/// Throws kPrecondition when 2^y >= n.
std::pair<ClientStateB, std::unique_ptr<EncryptedIndex>> setup_b(const SecurityConfig& config);

/// add: `ind` must not be live anywhere; del: `ind` must be live at v.
/// Each path node gets its own fresh encryption of the same mask.
UpdateBatchB client_update_b(ClientStateB& state, UpdateOp op, std::uint64_t v, const DocId& ind);

/// Grows the domain to `m` values, returning the root copies to send.
std::vector<CopyUpdateB> extend_domain_b(ClientStateB& state, std::uint64_t m);

/// One fixed token per cover node of [a, min(b, m-1)], including empty nodes.
std::vector<CoverTokenB> client_search_b(const ClientStateB& state, std::uint64_t a, std::uint64_t b);

std::optional<Bytes> server_search_b(const EncryptedIndex& index, const Token& ut);

/// T[ut] <- T[ut] * e, or e if absent.
void server_update_b(EncryptedIndex& index, const crypto::PaillierPublicKey& pub,
                     const UpdateMessageB& message);

/// T[dst] <- T[src] when src exists.
void server_copy_b(EncryptedIndex& index, const CopyMessage& message);

/// Slots held by one accumulator ciphertext.
std::set<std::uint32_t> decode_slots(const ClientStateB& state, ByteView ciphertext);

/// Decrypts, decodes and maps slots back to document ids.
std::set<DocId> client_decode_b(const ClientStateB& state, const std::vector<Bytes>& ciphertexts);

}  // namespace rdsse::scheme_b
