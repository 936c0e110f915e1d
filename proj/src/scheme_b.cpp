#include "rdsse/scheme_b.hpp"

#include <algorithm>
#include <string>

#include "rdsse/bitstring.hpp"
#include "rdsse/error.hpp"

namespace rdsse::scheme_b {

std::optional<Placement> DocDirectory::find(const DocId& id) const {
    auto it = live_.find(id);
    if (it == live_.end()) return std::nullopt;
    return it->second;
}

std::optional<DocId> DocDirectory::doc_at(std::uint32_t slot) const {
    auto it = by_slot_.find(slot);
    if (it == by_slot_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t DocDirectory::place(const DocId& id, std::uint64_t value) {
    if (live_.contains(id)) {
        throw Error(ErrorCode::kPrecondition, "document " + doc_id_name(id) + " is already live at value " +
                                                  std::to_string(live_.at(id).value));
    }
    if (live_.size() >= capacity()) {
        throw Error(ErrorCode::kCapacityExhausted,
                    "all " + std::to_string(capacity()) + " document slots are in use");
    }
    std::uint32_t slot = 0;
    for (const auto& [used, _] : by_slot_) {
        if (used != slot) break;
        ++slot;
    }
    live_[id] = {slot, value};
    by_slot_[slot] = id;
    return slot;
}

void DocDirectory::remove(const DocId& id) {
    auto it = live_.find(id);
    if (it == live_.end()) return;
    by_slot_.erase(it->second.slot);
    live_.erase(it);
}

void DocDirectory::restore(const DocId& id, Placement placement) {
    if (placement.slot >= capacity() || live_.contains(id) || by_slot_.contains(placement.slot)) {
        throw Error(ErrorCode::kMalformed, "inconsistent document directory entry");
    }
    live_[id] = placement;
    by_slot_[placement.slot] = id;
}

ClientStateB::ClientStateB(crypto::PrfKey prf_key, crypto::PaillierKeypair paillier, unsigned mask_width,
                           TreeGeometry geo, DocDirectory directory)
    : prf_key_(prf_key),
      paillier_(std::move(paillier)),
      mask_width_(mask_width),
      geo_(geo),
      directory_(std::move(directory)) {
    bitstring::max_safe_updates(mask_width_, paillier_.pub.n);  // throws if 2^y >= n
    if (directory_.capacity() != mask_width_ - 1) directory_ = DocDirectory(mask_width_);
}

Token ClientStateB::node_token(NodeLabel n) const {
    return crypto::prf_eval(prf_key_, crypto::PrfDomain::kUpdateToken, n);
}

PublicParams ClientStateB::public_params() const {
    PublicParams p;
    p.scheme = Scheme::kB;
    p.paillier = paillier_.pub;
    p.mask_width = mask_width_;
    return p;
}

std::vector<CopyUpdateB> ClientStateB::grow_once() {
    GrowthPlan plan = grow(geo_, geo_.m());
    std::vector<CopyUpdateB> out;
    for (const auto& d : plan.doublings) {
        out.push_back({d, {node_token(d.old_root), node_token(d.new_root)}});
    }
    geo_ = plan.geometry;
    return out;
}

std::pair<ClientStateB, std::unique_ptr<EncryptedIndex>> setup_b(const SecurityConfig& config) {
    auto keys = crypto::PaillierKeypair::generate(config.paillier_bits);
    ClientStateB state(crypto::PrfKey::generate(), std::move(keys), config.mask_width);
    auto index = std::make_unique<EncryptedIndex>(Scheme::kB);
    index->set_params(state.public_params());
    return {std::move(state), std::move(index)};
}

UpdateBatchB client_update_b(ClientStateB& state, UpdateOp op, std::uint64_t v, const DocId& ind) {
    if (v > state.geometry().m()) {
        throw Error(ErrorCode::kPrecondition, "value " + std::to_string(v) + " beyond m = " +
                                                  std::to_string(state.geometry().m()) +
                                                  "; extend the domain first");
    }
    auto& dir = state.directory();
    std::uint32_t slot = 0;
    mpz_class mask;
    // Validate before touching the geometry so a rejected call has no effect.
    if (op == UpdateOp::kAdd) {
        if (auto p = dir.find(ind)) {
            throw Error(ErrorCode::kPrecondition, "document " + doc_id_name(ind) +
                                                      " is already live at value " + std::to_string(p->value));
        }
        if (dir.live_count() >= dir.capacity()) {
            throw Error(ErrorCode::kCapacityExhausted,
                        "all " + std::to_string(dir.capacity()) + " document slots are in use");
        }
    } else {
        auto p = dir.find(ind);
        if (!p || p->value != v) {
            throw Error(ErrorCode::kPrecondition,
                        "document " + doc_id_name(ind) + " is not live at value " + std::to_string(v));
        }
    }

    UpdateBatchB batch;
    if (v == state.geometry().m()) batch.copies = state.grow_once();

    if (op == UpdateOp::kAdd) {
        slot = dir.place(ind, v);
        mask = bitstring::encode_add(slot, state.mask_width());
    } else {
        slot = dir.find(ind)->slot;
        mask = bitstring::encode_del(slot, state.mask_width());
        dir.remove(ind);
    }
    batch.slot = slot;

    const auto& pub = state.paillier().pub;
    for (NodeLabel n : path_to_root(v, state.geometry().capacity())) {
        Bytes e = crypto::encode_ciphertext(pub, crypto::paillier_enc(pub, mask));
        batch.updates.push_back({n, {state.node_token(n), std::move(e)}});
    }
    return batch;
}

std::vector<CopyUpdateB> extend_domain_b(ClientStateB& state, std::uint64_t m) {
    std::vector<CopyUpdateB> all;
    while (state.geometry().m() < m) {
        auto c = state.grow_once();
        all.insert(all.end(), c.begin(), c.end());
    }
    return all;
}

std::vector<CoverTokenB> client_search_b(const ClientStateB& state, std::uint64_t a, std::uint64_t b) {
    if (a > b) {
        throw Error(ErrorCode::kInvalidArgument,
                    "range start " + std::to_string(a) + " > end " + std::to_string(b));
    }
    const auto& geo = state.geometry();
    if (geo.empty() || a >= geo.m()) return {};
    std::vector<CoverTokenB> out;
    for (NodeLabel n : minimal_cover(a, std::min(b, geo.m() - 1), geo)) {
        out.push_back({n, state.node_token(n)});
    }
    return out;
}

std::optional<Bytes> server_search_b(const EncryptedIndex& index, const Token& ut) { return index.find(ut); }

void server_update_b(EncryptedIndex& index, const crypto::PaillierPublicKey& pub,
                     const UpdateMessageB& message) {
    mpz_class incoming = crypto::decode_ciphertext(pub, message.e);
    index.mutate(message.ut, [&](const std::optional<Bytes>& current) {
        if (!current) return message.e;
        mpz_class existing = crypto::decode_ciphertext(pub, *current);
        return crypto::encode_ciphertext(pub, crypto::paillier_add(pub, existing, incoming));
    });
}

void server_copy_b(EncryptedIndex& index, const CopyMessage& message) { index.copy(message.src, message.dst); }

std::set<std::uint32_t> decode_slots(const ClientStateB& state, ByteView ciphertext) {
    const auto& keys = state.paillier();
    mpz_class c = crypto::decode_ciphertext(keys.pub, ciphertext);
    return bitstring::decode(crypto::paillier_dec(keys, c), state.mask_width());
}

std::set<DocId> client_decode_b(const ClientStateB& state, const std::vector<Bytes>& ciphertexts) {
    std::set<DocId> out;
    for (const auto& ct : ciphertexts) {
        for (auto slot : decode_slots(state, ct)) {
            if (auto id = state.directory().doc_at(slot)) out.insert(*id);
        }
    }
    return out;
}

}  // namespace rdsse::scheme_b
