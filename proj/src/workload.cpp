#include "rdsse/workload.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "rdsse/crypto/bigint.hpp"
#include "rdsse/error.hpp"
#include "rdsse/net.hpp"
#include "rdsse/session.hpp"

namespace rdsse::workload {

void ShadowDb::del(std::uint64_t v, const DocId& id) {
    auto it = db_.find(v);
    if (it == db_.end()) return;
    it->second.erase(id);
    if (it->second.empty()) db_.erase(it);
}

std::set<DocId> ShadowDb::range(std::uint64_t a, std::uint64_t b) const {
    std::set<DocId> out;
    for (auto it = db_.lower_bound(a); it != db_.end() && it->first <= b; ++it) {
        out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

bool ShadowDb::contains(std::uint64_t v, const DocId& id) const {
    auto it = db_.find(v);
    return it != db_.end() && it->second.contains(id);
}

std::optional<std::uint64_t> ShadowDb::value_of(const DocId& id) const {
    for (const auto& [v, ids] : db_) {
        if (ids.contains(id)) return v;
    }
    return std::nullopt;
}

std::size_t ShadowDb::live_pairs() const {
    std::size_t n = 0;
    for (const auto& [_, ids] : db_) n += ids.size();
    return n;
}

Bytes ShadowDb::serialize() const {
    Bytes out;
    put_u64(out, db_.size());
    for (const auto& [v, ids] : db_) {
        put_u64(out, v);
        put_u32(out, static_cast<std::uint32_t>(ids.size()));
        for (const auto& id : ids) put_bytes(out, view(id));
    }
    return out;
}

ShadowDb ShadowDb::deserialize(ByteView data) {
    ShadowDb db;
    ByteReader in(data);
    auto values = in.u64();
    for (std::uint64_t i = 0; i < values; ++i) {
        auto v = in.u64();
        auto n = in.u32();
        for (std::uint32_t k = 0; k < n; ++k) db.add(v, doc_id_from(in.bytes(kDocIdSize)));
    }
    if (!in.done()) throw Error(ErrorCode::kMalformed, "trailing bytes in shadow file");
    return db;
}

std::vector<WorkloadOp> generate(const WorkloadSpec& spec) {
    std::vector<WorkloadOp> out;
    if (spec.values == 0 || (spec.ops == 0 && spec.queries == 0)) return out;
    std::mt19937_64 rng(spec.seed);
    auto below = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    auto make_id = [](std::size_t k) { return doc_id_from_name("d" + std::to_string(k)); };

    std::size_t ops_left = spec.ops, queries_left = spec.queries;
    std::size_t issued = 0;
    std::vector<DocId> live_ids;                   // scheme B
    std::map<DocId, std::uint64_t> live_value;     // scheme B
    std::vector<DocId> deleted;                    // scheme B, not currently live
    const std::size_t max_docs = std::max<std::size_t>(spec.max_docs, 1);

    while (ops_left + queries_left > 0) {
        const std::size_t done = spec.ops - ops_left;
        const std::uint64_t limit =
            spec.ops == 0 ? spec.values
                          : std::max<std::uint64_t>(1, (spec.values * (done + 1) + spec.ops - 1) / spec.ops);
        if (below(ops_left + queries_left) < queries_left) {
            --queries_left;
            auto a = below(limit), b = below(limit);
            if (a > b) std::swap(a, b);
            out.push_back({WorkloadOp::Kind::kSearch, a, b, {}});
            continue;
        }
        --ops_left;
        if (spec.scheme == Scheme::kA) {
            out.push_back({WorkloadOp::Kind::kAdd, below(limit), 0, make_id(below(max_docs))});
            continue;
        }
        bool full = spec.max_live != 0 && live_ids.size() >= spec.max_live;
        bool want_del = !live_ids.empty() && (full || coin(spec.delete_fraction));
        if (!want_del) {
            std::optional<DocId> id;
            if (!deleted.empty() && (issued >= max_docs || coin(0.3))) {
                auto k = below(deleted.size());
                id = deleted[k];
                deleted.erase(deleted.begin() + static_cast<std::ptrdiff_t>(k));
            } else if (issued < max_docs) {
                id = make_id(issued++);
            }
            if (id) {
                auto v = below(limit);
                live_ids.push_back(*id);
                live_value[*id] = v;
                out.push_back({WorkloadOp::Kind::kAdd, v, 0, *id});
                continue;
            }
            if (live_ids.empty()) continue;
        }
        auto k = below(live_ids.size());
        DocId id = live_ids[k];
        live_ids.erase(live_ids.begin() + static_cast<std::ptrdiff_t>(k));
        out.push_back({WorkloadOp::Kind::kDel, live_value.at(id), 0, id});
        live_value.erase(id);
        deleted.push_back(id);
    }
    return out;
}

std::size_t expected_update_messages(std::uint64_t capacity) {
    return static_cast<std::size_t>(std::countr_zero(capacity)) + 1;
}

std::string VerifyReport::render() const {
    std::ostringstream out;
    auto row = [&](const std::string& k, const auto& v) {
        out << "  " << k << std::string(k.size() < 28 ? 28 - k.size() : 1, ' ') << v << '\n';
    };
    std::size_t max_cover = cover_sizes.empty() ? 0 : *std::max_element(cover_sizes.begin(), cover_sizes.end());
    row("updates", updates);
    row("deletes", deletes);
    row("searches", searches);
    row("mismatches", mismatches);
    row("max cover size", max_cover);
    row("max update fan-out", max_update_fanout);
    row("final capacity", final_capacity);
    row("doublings", doublings);
    row("root copies", copies);
    row("max client entries (A)", max_client_entries);
    row("crypto state bytes (B)",
        std::to_string(crypto_state_bytes_min) + ".." + std::to_string(crypto_state_bytes_max));
    row("max ciphertexts per node", max_ciphertexts_per_node);
    row("anomalies", anomalies);
    row("Table 1 violations", table1_violations);
    for (const auto& n : notes) out << "  ! " << n << '\n';
    return out.str();
}

namespace {

std::size_t crypto_state_bytes(const scheme_b::ClientStateB& s) {
    const auto& sec = s.paillier().sec;
    return s.prf_key().bytes.size() + crypto::to_bytes(sec.p).size() + crypto::to_bytes(sec.q).size() +
           crypto::to_bytes(sec.beta).size() + crypto::to_bytes(sec.mu).size() + sizeof(std::uint32_t) +
           sizeof(std::uint64_t);
}

struct Checker {
    VerifyReport& r;
    void fail(std::string note) {
        ++r.table1_violations;
        if (r.notes.size() < 8) r.notes.push_back(std::move(note));
    }
    void update(const client::UpdateOutcome& out, std::uint64_t capacity) {
        ++r.updates;
        r.doublings += out.doublings.size();
        r.copies += out.copies;
        r.max_update_fanout = std::max(r.max_update_fanout, out.messages);
        if (out.messages != expected_update_messages(capacity)) {
            fail("update " + std::to_string(r.updates) + " sent " + std::to_string(out.messages) +
                 " messages at C=" + std::to_string(capacity));
        }
    }
    void search(const client::SearchOutcome& out, const std::set<DocId>& expected, std::size_t expected_tokens) {
        ++r.searches;
        r.cover_sizes.push_back(out.cover_size);
        r.anomalies += out.anomalies;
        if (out.ids != expected) ++r.mismatches;
        if (out.tokens != expected_tokens) {
            fail("search " + std::to_string(r.searches) + " sent " + std::to_string(out.tokens) + " tokens, expected " +
                 std::to_string(expected_tokens));
        }
        // One RESULTS_B reply per token, each holding at most one ciphertext.
        if (out.ciphertexts > out.tokens) fail("more ciphertexts than search tokens");
        if (out.ciphertexts > 0) r.max_ciphertexts_per_node = std::max<std::size_t>(r.max_ciphertexts_per_node, 1);
    }
};

}  // namespace

VerifyReport verify_workload(const WorkloadSpec& spec, const SecurityConfig& config, audit::Transcript* transcript) {
    VerifyReport report;
    auto ops = generate(spec);
    if (ops.empty()) return report;
    auto start = std::chrono::steady_clock::now();
    ShadowDb shadow;
    Checker check{report};

    if (spec.scheme == Scheme::kA) {
        auto [state, index] = scheme_a::setup_a(config);
        net::Server server(*index);
        net::LoopbackChannel channel(server);
        client::SessionA session(state, channel, transcript);
        session.hello();
        for (const auto& op : ops) {
            if (op.kind == WorkloadOp::Kind::kSearch) {
                auto out = session.search(op.v, op.b);
                std::size_t with_state = 0;
                const auto& geo = state.geometry();
                if (!geo.empty() && op.v < geo.m()) {
                    for (auto n : minimal_cover(op.v, std::min(op.b, geo.m() - 1), geo)) {
                        auto it = state.chains().find(n);
                        if (it != state.chains().end() && it->second.has_state()) ++with_state;
                    }
                }
                check.search(out, shadow.range(op.v, op.b), with_state);
                continue;
            }
            auto out = session.add(op.v, op.id);
            shadow.add(op.v, op.id);
            auto capacity = state.geometry().capacity();
            check.update(out, capacity);
            report.max_client_entries = std::max(report.max_client_entries, state.entry_count());
            if (state.entry_count() > 2 * capacity - 1) {
                check.fail("client holds " + std::to_string(state.entry_count()) + " entries at C=" +
                           std::to_string(capacity));
            }
        }
        report.final_capacity = state.geometry().capacity();
        report.anomalies += index->anomalies();
    } else {
        auto [state, index] = scheme_b::setup_b(config);
        net::Server server(*index);
        net::LoopbackChannel channel(server);
        client::SessionB session(state, channel, transcript);
        session.hello();
        report.crypto_state_bytes_min = report.crypto_state_bytes_max = crypto_state_bytes(state);
        for (const auto& op : ops) {
            if (op.kind == WorkloadOp::Kind::kSearch) {
                auto out = session.search(op.v, op.b);
                check.search(out, shadow.range(op.v, op.b), out.cover_size);
                continue;
            }
            client::UpdateOutcome out;
            if (op.kind == WorkloadOp::Kind::kAdd) {
                out = session.add(op.v, op.id);
                shadow.add(op.v, op.id);
            } else {
                out = session.del(op.v, op.id);
                shadow.del(op.v, op.id);
                ++report.deletes;
            }
            check.update(out, state.geometry().capacity());
            auto bytes = crypto_state_bytes(state);
            report.crypto_state_bytes_min = std::min(report.crypto_state_bytes_min, bytes);
            report.crypto_state_bytes_max = std::max(report.crypto_state_bytes_max, bytes);
        }
        if (report.crypto_state_bytes_min != report.crypto_state_bytes_max) {
            check.fail("scheme B key state changed size during the run");
        }
        report.final_capacity = state.geometry().capacity();
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace rdsse::workload
