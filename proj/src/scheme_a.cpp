#include "rdsse/scheme_a.hpp"

#include <algorithm>
#include <string>

#include "rdsse/error.hpp"

namespace rdsse::scheme_a {

std::vector<ChainSegment> NodeChain::segments(NodeLabel self) const {
    std::vector<ChainSegment> out;
    out.reserve(inherited.size() + 1);
    if (own_counter >= 0) {
        out.push_back({self, *own_head, own_counter, 0});
    }
    out.insert(out.end(), inherited.begin(), inherited.end());
    return out;
}

ClientStateA::ClientStateA(crypto::PrfKey prf_key, crypto::TdpKeypair tdp, TreeGeometry geo,
                           std::map<NodeLabel, NodeChain> chains)
    : prf_key_(prf_key), tdp_(std::move(tdp)), geo_(geo), chains_(std::move(chains)) {}

Token ClientStateA::node_key(NodeLabel n) const {
    return crypto::prf_eval(prf_key_, crypto::PrfDomain::kNodeKey, n);
}

PublicParams ClientStateA::public_params() const {
    PublicParams p;
    p.scheme = Scheme::kA;
    p.tdp = tdp_.pub;
    p.id_length = kDocIdSize;
    return p;
}

std::vector<Doubling> ClientStateA::grow_once() {
    GrowthPlan plan = grow(geo_, geo_.m());
    for (const auto& d : plan.doublings) {
        auto old = chains_.find(d.old_root);
        if (old == chains_.end() || !old->second.has_state()) continue;
        NodeChain fresh;
        fresh.own_head = crypto::tdp_sample(tdp_.pub);
        fresh.own_counter = -1;
        fresh.inherited = old->second.segments(d.old_root);
        chains_[d.new_root] = std::move(fresh);
    }
    geo_ = plan.geometry;
    return plan.doublings;
}

std::pair<SearchToken, std::int64_t> ClientStateA::advance(NodeLabel n) {
    NodeChain& chain = chains_[n];
    if (chain.own_counter < 0) {
        if (!chain.own_head) chain.own_head = crypto::tdp_sample(tdp_.pub);
        chain.own_counter = 0;
    } else {
        chain.own_head = crypto::tdp_inverse(tdp_, *chain.own_head);
        ++chain.own_counter;
    }
    return {*chain.own_head, chain.own_counter};
}

std::pair<ClientStateA, std::unique_ptr<EncryptedIndex>> setup_a(const SecurityConfig& config) {
    ClientStateA state(crypto::PrfKey::generate(), crypto::TdpKeypair::generate(config.tdp_bits));
    auto index = std::make_unique<EncryptedIndex>(Scheme::kA);
    index->set_params(state.public_params());
    return {std::move(state), std::move(index)};
}

UpdateBatchA client_update_a(ClientStateA& state, std::uint64_t v, const DocId& ind) {
    if (v > state.geometry().m()) {
        throw Error(ErrorCode::kPrecondition, "value " + std::to_string(v) + " beyond m = " +
                                                  std::to_string(state.geometry().m()) +
                                                  "; extend the domain first");
    }
    UpdateBatchA batch;
    if (v == state.geometry().m()) batch.doublings = state.grow_once();

    for (NodeLabel n : path_to_root(v, state.geometry().capacity())) {
        auto [st, counter] = state.advance(n);
        Token key = state.node_key(n);
        UpdateMessageA msg{crypto::h1(key, st.bytes), crypto::xor_pad(ind, crypto::h2(key, st.bytes))};
        batch.updates.push_back({n, std::move(st), counter, msg});
    }
    return batch;
}

std::vector<Doubling> extend_domain_a(ClientStateA& state, std::uint64_t m) {
    std::vector<Doubling> all;
    while (state.geometry().m() < m) {
        auto d = state.grow_once();
        all.insert(all.end(), d.begin(), d.end());
    }
    return all;
}

std::vector<CoverRequestA> client_search_a(const ClientStateA& state, std::uint64_t a, std::uint64_t b) {
    if (a > b) {
        throw Error(ErrorCode::kInvalidArgument,
                    "range start " + std::to_string(a) + " > end " + std::to_string(b));
    }
    const auto& geo = state.geometry();
    if (geo.empty() || a >= geo.m()) return {};
    std::vector<CoverRequestA> out;
    for (NodeLabel n : minimal_cover(a, std::min(b, geo.m() - 1), geo)) {
        auto it = state.chains().find(n);
        if (it == state.chains().end() || !it->second.has_state()) continue;
        CoverRequestA req{n, {}};
        for (const auto& seg : it->second.segments(n)) {
            req.request.segments.push_back(
                {state.node_key(seg.key_label), seg.head_st, seg.from_counter, seg.to_counter});
        }
        out.push_back(std::move(req));
    }
    return out;
}

SearchResultA server_search_a(const EncryptedIndex& index, const crypto::TdpPublicKey& pub,
                              const SearchRequestA& request) {
    SearchResultA result;
    for (const auto& seg : request.segments) {
        if (seg.from_counter < seg.to_counter || seg.to_counter < 0) {
            throw Error(ErrorCode::kMalformed, "segment counters out of order");
        }
        SearchToken st = seg.head;
        for (std::int64_t i = seg.from_counter; i >= seg.to_counter; --i) {
            Token ut = crypto::h1(seg.key, st.bytes);
            if (auto e = index.find(ut); e && e->size() == kDocIdSize) {
                result.ids.push_back(crypto::xor_pad(doc_id_from(*e), crypto::h2(seg.key, st.bytes)));
            } else {
                ++result.anomalies;
            }
            if (i > seg.to_counter) st = crypto::tdp_forward(pub, st);
        }
    }
    return result;
}

void server_update_a(EncryptedIndex& index, const UpdateMessageA& message) {
    index.insert_unique(message.ut, Bytes(message.e.begin(), message.e.end()));
}

std::set<DocId> merge_results_a(const std::vector<SearchResultA>& results) {
    std::set<DocId> out;
    for (const auto& r : results) out.insert(r.ids.begin(), r.ids.end());
    return out;
}

}  // namespace rdsse::scheme_a
