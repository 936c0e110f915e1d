#pragma once

#include <set>
#include <string>

#include "rdsse/scheme_a.hpp"
#include "rdsse/scheme_b.hpp"

namespace rdsse::testing {

inline std::set<std::string> names(const std::set<DocId>& ids) {
    std::set<std::string> out;
    for (const auto& id : ids) out.insert(doc_id_name(id));
    return out;
}

/// Client and server halves of scheme A wired together without a network.
struct PipelineA {
    scheme_a::ClientStateA state;
    std::unique_ptr<EncryptedIndex> index;

    PipelineA() : PipelineA(scheme_a::setup_a(SecurityConfig::test_profile())) {}

    scheme_a::UpdateBatchA add(std::uint64_t v, const std::string& name) {
        scheme_a::extend_domain_a(state, v);
        auto batch = scheme_a::client_update_a(state, v, doc_id_from_name(name));
        for (const auto& u : batch.updates) scheme_a::server_update_a(*index, u.message);
        return batch;
    }

    std::set<std::string> search(std::uint64_t a, std::uint64_t b, std::uint64_t* anomalies = nullptr) {
        std::vector<scheme_a::SearchResultA> results;
        for (const auto& req : scheme_a::client_search_a(state, a, b)) {
            results.push_back(scheme_a::server_search_a(*index, state.tdp().pub, req.request));
            if (anomalies) *anomalies += results.back().anomalies;
        }
        return names(scheme_a::merge_results_a(results));
    }

private:
    explicit PipelineA(std::pair<scheme_a::ClientStateA, std::unique_ptr<EncryptedIndex>> p)
        : state(std::move(p.first)), index(std::move(p.second)) {}
};

struct PipelineB {
    scheme_b::ClientStateB state;
    std::unique_ptr<EncryptedIndex> index;

    PipelineB() : PipelineB(scheme_b::setup_b(SecurityConfig::test_profile())) {}

    void apply(const std::vector<scheme_b::CopyUpdateB>& copies) {
        for (const auto& c : copies) scheme_b::server_copy_b(*index, c.message);
    }

    scheme_b::UpdateBatchB update(scheme_b::UpdateOp op, std::uint64_t v, const std::string& name) {
        if (v > state.geometry().m()) apply(scheme_b::extend_domain_b(state, v));
        auto batch = scheme_b::client_update_b(state, op, v, doc_id_from_name(name));
        apply(batch.copies);
        for (const auto& u : batch.updates) scheme_b::server_update_b(*index, state.paillier().pub, u.message);
        return batch;
    }
    scheme_b::UpdateBatchB add(std::uint64_t v, const std::string& name) {
        return update(scheme_b::UpdateOp::kAdd, v, name);
    }
    scheme_b::UpdateBatchB del(std::uint64_t v, const std::string& name) {
        return update(scheme_b::UpdateOp::kDel, v, name);
    }
    void extend(std::uint64_t m) { apply(scheme_b::extend_domain_b(state, m)); }

    std::set<std::string> search(std::uint64_t a, std::uint64_t b) {
        std::vector<Bytes> cts;
        for (const auto& tok : scheme_b::client_search_b(state, a, b)) {
            if (auto c = scheme_b::server_search_b(*index, tok.ut)) cts.push_back(*c);
        }
        return names(scheme_b::client_decode_b(state, cts));
    }

    /// Slots held by node n's accumulator ({} when the node has no entry).
    std::set<std::uint32_t> node_slots(NodeLabel n) {
        auto c = index->find(state.node_token(n));
        return c ? scheme_b::decode_slots(state, *c) : std::set<std::uint32_t>{};
    }

private:
    explicit PipelineB(std::pair<scheme_b::ClientStateB, std::unique_ptr<EncryptedIndex>> p)
        : state(std::move(p.first)), index(std::move(p.second)) {}
};

}  // namespace rdsse::testing
