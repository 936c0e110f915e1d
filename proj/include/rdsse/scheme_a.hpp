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
#include "rdsse/crypto/prf.hpp"
#include "rdsse/crypto/tdp.hpp"
#include "rdsse/encrypted_index.hpp"
#include "rdsse/range_tree.hpp"

namespace rdsse::scheme_a {

using crypto::SearchToken;

/// Contiguous slice [to_counter, from_counter] of one node's token chain;
/// head_st is the token at from_counter. The chain is keyed by
/// K = F_K(key_label), which may differ from the node that stores the segment.
struct ChainSegment {
    NodeLabel key_label;
    SearchToken head_st;
    std::int64_t from_counter = 0;
    std::int64_t to_counter = 0;

    friend bool operator==(const ChainSegment&, const ChainSegment&) = default;
};

/// Client state for one node. A node created as a new root by growth owns a
/// fresh chain and remembers the old root's chain as inherited segments.
struct NodeChain {
    std::optional<SearchToken> own_head;
    std::int64_t own_counter = -1;
    std::vector<ChainSegment> inherited;  // newest first

    bool has_state() const { return own_counter >= 0 || !inherited.empty(); }
    /// Own segment (if any) followed by the inherited ones.
    std::vector<ChainSegment> segments(NodeLabel self) const;

    friend bool operator==(const NodeChain&, const NodeChain&) = default;
};

struct UpdateMessageA {
    Token ut;
    DocId e;

    friend bool operator==(const UpdateMessageA&, const UpdateMessageA&) = default;
};

/// One emitted message plus the client-side facts behind it (never sent).
struct PathUpdateA {
    NodeLabel node;
    SearchToken st;
    std::int64_t counter = 0;
    UpdateMessageA message;
};

struct UpdateBatchA {
    std::vector<Doubling> doublings;
    std::vector<PathUpdateA> updates;
};

struct SegmentRequest {
    Token key;
    SearchToken head;
    std::int64_t from_counter = 0;
    std::int64_t to_counter = 0;

    friend bool operator==(const SegmentRequest&, const SegmentRequest&) = default;
};

struct SearchRequestA {
    std::vector<SegmentRequest> segments;

    friend bool operator==(const SearchRequestA&, const SearchRequestA&) = default;
};

struct CoverRequestA {
    NodeLabel node;
    SearchRequestA request;
};

struct SearchResultA {
    std::vector<DocId> ids;  // newest first
    std::uint64_t anomalies = 0;
};

class ClientStateA {
public:
    ClientStateA(crypto::PrfKey prf_key, crypto::TdpKeypair tdp, TreeGeometry geo = {},
                 std::map<NodeLabel, NodeChain> chains = {});

    const crypto::PrfKey& prf_key() const { return prf_key_; }
    const crypto::TdpKeypair& tdp() const { return tdp_; }
    const TreeGeometry& geometry() const { return geo_; }
    const std::map<NodeLabel, NodeChain>& chains() const { return chains_; }
    std::size_t entry_count() const { return chains_.size(); }

    /// K_n = F_K(n).
    Token node_key(NodeLabel n) const;
    PublicParams public_params() const;

    /// Appends one value to the domain, migrating root state on doubling.
    std::vector<Doubling> grow_once();
    /// Steps the node's own chain with the inverse permutation (or takes ST_0).
    std::pair<SearchToken, std::int64_t> advance(NodeLabel n);

private:
    crypto::PrfKey prf_key_;
    crypto::TdpKeypair tdp_;
    TreeGeometry geo_;
    std::map<NodeLabel, NodeChain> chains_;
};

std::pair<ClientStateA, std::unique_ptr<EncryptedIndex>> setup_a(const SecurityConfig& config);

/// Adds `ind` under value v. Requires v <= m; v = m grows the domain first.
/// Emits one message per node on the leaf-to-root path.
UpdateBatchA client_update_a(ClientStateA& state, std::uint64_t v, const DocId& ind);

/// Grows the domain until it holds `m` values; no server traffic is needed.
std::vector<Doubling> extend_domain_a(ClientStateA& state, std::uint64_t m);

/// One request per cover node of [a, min(b, m-1)] that has state.
std::vector<CoverRequestA> client_search_a(const ClientStateA& state, std::uint64_t a, std::uint64_t b);

/// Replays each segment with the forward permutation.
SearchResultA server_search_a(const EncryptedIndex& index, const crypto::TdpPublicKey& pub,
                              const SearchRequestA& request);

void server_update_a(EncryptedIndex& index, const UpdateMessageA& message);

/// Unions per-node results and drops repeats.
std::set<DocId> merge_results_a(const std::vector<SearchResultA>& results);

}  // namespace rdsse::scheme_a
