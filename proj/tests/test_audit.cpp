#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "rdsse/audit.hpp"
#include "rdsse/net.hpp"
#include "rdsse/session.hpp"
#include "rdsse/workload.hpp"

using namespace rdsse;
using audit::EventKind;
using audit::EventOp;
using audit::Transcript;

namespace {

DocId id(const std::string& s) { return doc_id_from_name(s); }

/// Scheme A client, in-process server, transcript.
struct RigA {
    scheme_a::ClientStateA state;
    EncryptedIndex index{Scheme::kA};
    net::Server server{index};
    net::LoopbackChannel channel{server};
    Transcript tr;
    client::SessionA session;

    RigA() : state(scheme_a::setup_a(SecurityConfig::test_profile()).first), session(state, channel, &tr) {
        session.hello();
    }
};

struct RigB {
    scheme_b::ClientStateB state;
    EncryptedIndex index{Scheme::kB};
    net::Server server{index};
    net::LoopbackChannel channel{server};
    Transcript tr;
    client::SessionB session;

    RigB() : state(scheme_b::setup_b(SecurityConfig::test_profile()).first), session(state, channel, &tr) {
        session.hello();
    }
};

/// Timestamp of the last search event on node n.
std::uint64_t search_t(const Transcript& tr, NodeLabel n) {
    std::uint64_t t = 0;
    for (const auto& e : tr.events()) {
        if (e.kind == EventKind::kSearch && e.node == n) t = e.t;
    }
    return t;
}

template <typename Rig>
void run_workload(Rig& rig, const workload::WorkloadSpec& spec) {
    for (const auto& op : workload::generate(spec)) {
        switch (op.kind) {
            case workload::WorkloadOp::Kind::kAdd: rig.session.add(op.v, op.id); break;
            case workload::WorkloadOp::Kind::kDel:
                if constexpr (requires { rig.session.del(op.v, op.id); }) rig.session.del(op.v, op.id);
                break;
            case workload::WorkloadOp::Kind::kSearch: rig.session.search(op.v, op.b); break;
        }
    }
}

std::set<NodeLabel> all_nodes(const Transcript& tr) {
    std::set<NodeLabel> out;
    for (const auto& e : tr.events()) out.insert(e.node);
    return out;
}

}  // namespace

TEST(Leakage, SearchPatternByDefinition) {
    RigA rig;
    scheme_a::extend_domain_a(rig.state, 8);
    rig.session.add(2, id("a"));
    rig.session.search(2, 2);  // leaf 4
    rig.session.add(3, id("b"));
    rig.session.search(2, 2);
    auto leaf = NodeLabel{4};
    std::set<std::uint64_t> expect;
    for (const auto& e : rig.tr.events()) {
        if (e.kind == EventKind::kSearch && e.node == leaf) expect.insert(e.t);
    }
    ASSERT_EQ(expect.size(), 2u);
    EXPECT_EQ(audit::sp(rig.tr, leaf), expect);
    EXPECT_TRUE(audit::sp(rig.tr, NodeLabel{12}).empty());
}

TEST(Leakage, HistoryOrder) {
    RigB rig;
    rig.session.add(0, id("a"));
    rig.session.del(0, id("a"));
    auto h = audit::hist(rig.tr, NodeLabel{0});
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0].op, EventOp::kAdd);
    EXPECT_EQ(h[1].op, EventOp::kDel);
    EXPECT_EQ(h[0].ind, id("a"));
    EXPECT_LT(h[0].t, h[1].t);
    RigA a;
    a.session.add(0, id("x"));
    auto ha = audit::hist(a.tr, NodeLabel{0});
    ASSERT_EQ(ha.size(), 1u);
    EXPECT_EQ(ha[0], (audit::HistEntry{1, EventOp::kAdd, id("x")}));
}

// [0,0] at t1, then [0,1] at t2 with nothing stored at value 1: DB(root) at t2
// equals DB(leaf 0) at t1, so t1 is reported.
TEST(Leakage, ContainmentTwoQueryFixture) {
    RigA rig;
    scheme_a::extend_domain_a(rig.state, 2);
    rig.session.add(0, id("a"));
    rig.session.search(0, 0);
    rig.session.search(0, 1);
    auto t1 = search_t(rig.tr, NodeLabel{0});
    auto t2 = search_t(rig.tr, NodeLabel{1});
    EXPECT_EQ(audit::cp(rig.tr, NodeLabel{1}, t2), (std::set<std::uint64_t>{t1}));
    EXPECT_TRUE(audit::cp(rig.tr, NodeLabel{0}, t1).empty());  // first search
}

TEST(Leakage, ContainmentRequiresSubset) {
    RigA rig;
    rig.session.add(0, id("a"));
    rig.session.add(1, id("b"));
    rig.session.search(0, 0);
    rig.session.search(0, 1);
    EXPECT_TRUE(audit::cp(rig.tr, NodeLabel{1}, search_t(rig.tr, NodeLabel{1})).empty());
}

TEST(Leakage, DisjointRangesLeakNoContainment) {
    RigA rig;
    for (std::uint64_t v = 0; v < 8; ++v) rig.session.add(v, id("d" + std::to_string(v)));
    rig.session.search(0, 3);
    rig.session.search(4, 7);
    rig.session.search(0, 1);  // subset of [0,3], but disjoint from [4,7]
    auto t_right = search_t(rig.tr, NodeLabel{11});
    EXPECT_TRUE(audit::cp(rig.tr, NodeLabel{11}, t_right).empty());
    auto t_left = search_t(rig.tr, NodeLabel{3});
    auto cp_small = audit::cp(rig.tr, NodeLabel{1}, search_t(rig.tr, NodeLabel{1}));
    EXPECT_EQ(cp_small, (std::set<std::uint64_t>{t_left}));
}

TEST(Leakage, IncrementalEqualsFromScratch) {
    for (Scheme scheme : {Scheme::kA, Scheme::kB}) {
        workload::WorkloadSpec spec;
        spec.seed = 21;
        spec.scheme = scheme;
        spec.values = 32;
        spec.ops = 120;
        spec.queries = 40;
        spec.max_docs = 40;
        if (scheme == Scheme::kB) spec.delete_fraction = 0.3;
        Transcript tr;
        if (scheme == Scheme::kA) {
            RigA rig;
            run_workload(rig, spec);
            tr = rig.tr;
        } else {
            RigB rig;
            run_workload(rig, spec);
            tr = rig.tr;
        }
        audit::LeakageTracker tracker;
        for (const auto& e : tr.events()) tracker.observe(e);
        std::size_t nonempty_cp = 0;
        for (auto n : all_nodes(tr)) {
            EXPECT_EQ(tracker.sp(n), audit::sp(tr, n));
            EXPECT_EQ(tracker.hist(n), audit::hist(tr, n));
            for (auto t : audit::sp(tr, n)) {
                auto full = audit::cp(tr, n, t);
                EXPECT_EQ(tracker.cp(n, t), full);
                nonempty_cp += !full.empty();
            }
        }
        EXPECT_GT(nonempty_cp, 0u) << "workload too small to exercise cp";
    }
}

// The scheme-A server learns plaintext ids, so it can compute cp itself.
TEST(Leakage, ServerComputableContainmentMatchesGroundTruth) {
    RigA rig;
    workload::WorkloadSpec spec;
    spec.seed = 4;
    spec.values = 32;
    spec.ops = 100;
    spec.queries = 40;
    spec.max_docs = 30;
    run_workload(rig, spec);
    auto server = audit::server_cp_a(rig.tr.server_view());
    std::size_t compared = 0;
    for (const auto& e : rig.tr.events()) {
        if (e.kind != EventKind::kSearch) continue;
        ASSERT_TRUE(server.count(e.seq)) << "seq " << e.seq;
        EXPECT_EQ(server.at(e.seq), audit::cp(rig.tr, e.node, e.t)) << "seq " << e.seq;
        ++compared;
    }
    EXPECT_GT(compared, 40u);
}

TEST(Audit, HonestSchemeAPasses) {
    RigA rig;
    workload::WorkloadSpec spec;
    spec.seed = 9;
    spec.values = 64;
    spec.ops = 300;
    spec.queries = 60;
    run_workload(rig, spec);
    auto report = audit::audit_forward_a(rig.tr, rig.state.tdp().pub);
    EXPECT_TRUE(report.pass()) << report.render();
    EXPECT_EQ(report.counters["update_operations"], 300u);
    EXPECT_GT(report.counters["derived_tokens"], 0u);
    EXPECT_NE(report.render().find("audit_forward_a: PASS"), std::string::npos);
}

// Buggy client: after a search, it reuses the node's current search token for
// a fresh update instead of advancing the chain.
TEST(Audit, TokenReuseFaultIsCaught) {
    RigA rig;
    rig.session.add(0, id("a"));
    rig.session.search(0, 0);
    std::uint64_t first_seq = 0;
    for (const auto& e : rig.tr.events()) {
        if (e.kind == EventKind::kUpdate && e.node == NodeLabel{0}) first_seq = e.seq;
    }
    const auto& chain = rig.state.chains().at(NodeLabel{0});
    Token key = rig.state.node_key(NodeLabel{0});
    scheme_a::UpdateMessageA reused{crypto::h1(key, chain.own_head->bytes),
                                    crypto::xor_pad(id("b"), crypto::h2(key, chain.own_head->bytes))};
    audit::TranscriptEvent bad;
    bad.t = rig.tr.begin_operation();
    bad.kind = EventKind::kUpdate;
    bad.node = NodeLabel{0};
    bad.op = EventOp::kAdd;
    bad.ind = id("b");
    bad.value = 0;
    bad.keywords_touched = 1;
    bad.msg_type = static_cast<std::uint8_t>(wire::MsgType::kUpdateA);
    auto f = wire::make_update_a(reused);
    bad.wire_bytes.assign(f.payload.begin(), f.payload.end());
    auto bad_seq = rig.tr.record(bad).seq;

    auto report = audit::audit_forward_a(rig.tr, rig.state.tdp().pub);
    ASSERT_FALSE(report.pass());
    ASSERT_EQ(report.violations.size(), 1u) << report.render();
    const auto& v = report.violations.front();
    EXPECT_EQ(v.check, "token_freshness");
    EXPECT_EQ(v.seqs, (std::vector<std::uint64_t>{first_seq, bad_seq}));
    EXPECT_NE(report.render().find("FAIL"), std::string::npos);
}

// Reuse that the server can only notice through its search-time derivation:
// a token that was never sent as an update but was walked during a search.
TEST(Audit, DerivedTokenReuseIsCaught) {
    RigA rig;
    rig.session.add(0, id("a"));
    rig.session.add(0, id("b"));
    rig.session.search(0, 0);
    // Rebuild the transcript without the original update events so only the
    // search-derived tokens remain as prior observations.
    Transcript stripped;
    std::uint64_t last_t = 0;
    for (auto e : rig.tr.events()) {
        if (e.kind == EventKind::kUpdate) continue;
        if (e.t != last_t) last_t = stripped.begin_operation();
        e.t = last_t;
        stripped.record(e);
    }
    const auto& head = *rig.state.chains().at(NodeLabel{0}).own_head;
    Token key = rig.state.node_key(NodeLabel{0});
    auto f = wire::make_update_a({crypto::h1(key, head.bytes), crypto::xor_pad(id("c"), crypto::h2(key, head.bytes))});
    audit::TranscriptEvent bad;
    bad.t = stripped.begin_operation();
    bad.kind = EventKind::kUpdate;
    bad.node = NodeLabel{0};
    bad.keywords_touched = 1;
    bad.msg_type = static_cast<std::uint8_t>(wire::MsgType::kUpdateA);
    bad.wire_bytes.assign(f.payload.begin(), f.payload.end());
    auto bad_seq = stripped.record(bad).seq;
    auto report = audit::audit_forward_a(stripped, rig.state.tdp().pub);
    ASSERT_EQ(report.violations.size(), 1u) << report.render();
    EXPECT_EQ(report.violations[0].check, "token_freshness");
    EXPECT_EQ(report.violations[0].seqs.back(), bad_seq);
    EXPECT_NE(report.violations[0].seqs.front(), bad_seq);
}

TEST(Audit, HonestSchemeBPasses) {
    RigB rig;
    workload::WorkloadSpec spec;
    spec.seed = 13;
    spec.scheme = Scheme::kB;
    spec.values = 64;
    spec.ops = 300;
    spec.queries = 80;
    spec.delete_fraction = 0.3;
    spec.max_docs = 100;
    run_workload(rig, spec);
    auto report = audit::audit_backward_b(rig.tr, rig.state.paillier(), rig.state.mask_width());
    EXPECT_TRUE(report.pass()) << report.render();
    EXPECT_GT(report.counters["deleted_docs_checked"], 0u);
    EXPECT_GT(report.counters["delete_operations"], 0u);
    EXPECT_GT(report.counters["replies_checked"], 0u);
}

TEST(Audit, ResurfacedDeleteIsCaught) {
    // Server that forgets deletes: replay the transcript, but answer searches
    // from an index that never saw the delete messages.
    RigB rig;
    rig.session.add(0, id("a"));
    rig.session.add(1, id("b"));
    rig.session.del(0, id("a"));
    rig.session.search(0, 1);
    Transcript tampered;
    // Swap in a reply computed from the pre-delete state of the root.
    EncryptedIndex stale(Scheme::kB);
    for (const auto& e : rig.tr.events()) {
        if (e.kind == EventKind::kUpdate && e.op == EventOp::kAdd) {
            auto msg = wire::parse_update_b({e.msg_type, std::string(e.wire_bytes.begin(), e.wire_bytes.end())});
            scheme_b::server_update_b(stale, rig.state.paillier().pub, msg);
        } else if (e.kind == EventKind::kCopy) {
            auto msg = wire::parse_copy_b({e.msg_type, std::string(e.wire_bytes.begin(), e.wire_bytes.end())});
            scheme_b::server_copy_b(stale, msg);
        }
    }
    std::uint64_t last_t = 0;
    for (auto e : rig.tr.events()) {
        if (e.t != last_t) last_t = tampered.begin_operation();
        e.t = last_t;
        if (e.kind == EventKind::kSearch) {
            auto ut = wire::parse_search_b({e.msg_type, std::string(e.wire_bytes.begin(), e.wire_bytes.end())});
            auto reply = wire::make_results_b(scheme_b::server_search_b(stale, ut));
            e.reply_bytes.assign(reply.payload.begin(), reply.payload.end());
        }
        tampered.record(e);
    }
    auto report = audit::audit_backward_b(tampered, rig.state.paillier(), rig.state.mask_width());
    ASSERT_FALSE(report.pass());
    bool resurfaced = false;
    for (const auto& v : report.violations) resurfaced |= v.check == "deleted_doc_resurfaced";
    EXPECT_TRUE(resurfaced) << report.render();
}

TEST(Audit, ReportsAreDeterministic) {
    RigB rig;
    rig.session.add(0, id("a"));
    rig.session.add(3, id("b"));
    rig.session.del(0, id("a"));
    rig.session.search(0, 3);
    auto r1 = audit::audit_backward_b(rig.tr, rig.state.paillier(), rig.state.mask_width()).render();
    auto r2 = audit::audit_backward_b(Transcript::deserialize(rig.tr.serialize()), rig.state.paillier(),
                                      rig.state.mask_width())
                  .render();
    EXPECT_EQ(r1, r2);
    RigA a;
    a.session.add(2, id("x"));
    a.session.search(0, 3);
    EXPECT_EQ(audit::audit_forward_a(a.tr, a.state.tdp().pub).render(),
              audit::audit_forward_a(a.tr, a.state.tdp().pub).render());
}
