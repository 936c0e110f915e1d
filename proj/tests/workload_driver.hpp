#pragma once

#include <set>
#include <string>
#include <vector>

#include "process.hpp"
#include "rdsse/net.hpp"
#include "rdsse/session.hpp"
#include "rdsse/workload.hpp"
#include "temp_dir.hpp"

namespace rdsse::testing {

using Results = std::vector<std::set<DocId>>;

/// Applies ops[from, to) and appends every search result. With a shadow, the
/// shadow answer for each search goes to *expected.
template <typename Session>
void run_ops(Session& s, const std::vector<workload::WorkloadOp>& ops, std::size_t from, std::size_t to,
             Results& out, workload::ShadowDb* shadow = nullptr, Results* expected = nullptr) {
    using Kind = workload::WorkloadOp::Kind;
    for (std::size_t i = from; i < to; ++i) {
        const auto& op = ops[i];
        switch (op.kind) {
            case Kind::kAdd:
                s.add(op.v, op.id);
                if (shadow) shadow->add(op.v, op.id);
                break;
            case Kind::kDel:
                if constexpr (requires { s.del(op.v, op.id); }) s.del(op.v, op.id);
                if (shadow) shadow->del(op.v, op.id);
                break;
            case Kind::kSearch:
                out.push_back(s.search(op.v, op.b).ids);
                if (expected && shadow) expected->push_back(shadow->range(op.v, op.b));
                break;
        }
    }
}

inline workload::WorkloadSpec crash_spec(Scheme scheme) {
    workload::WorkloadSpec spec;
    spec.seed = 11;
    spec.scheme = scheme;
    spec.values = 40;
    spec.ops = 160;
    spec.queries = 40;
    spec.max_docs = 60;
    if (scheme == Scheme::kB) spec.delete_fraction = 0.3;
    return spec;
}

struct CrashOutcome {
    Results got;        // searches across the kill and restart
    Results expected;   // plaintext shadow
    Results reference;  // same keys and ops, never interrupted
    std::size_t entries_before_kill = 0;
    std::string restart_banner;

    bool entries_survived() const {
        return restart_banner.find("entries=" + std::to_string(entries_before_kill) + " ") != std::string::npos;
    }
    bool ok() const { return got == expected && got == reference && entries_survived(); }
};

/// Runs half the workload against the server binary, SIGKILLs it after an
/// acknowledged operation, restarts it on the same store and finishes.
template <typename State, typename Session>
CrashOutcome crash_and_recover(const workload::WorkloadSpec& spec, const std::string& scheme_arg,
                               const State& fresh_state) {
    auto ops = workload::generate(spec);
    CrashOutcome outcome;
    {
        State state = fresh_state;
        EncryptedIndex index(spec.scheme);
        net::Server server(index);
        net::LoopbackChannel ch(server);
        Session s(state, ch);
        s.hello();
        run_ops(s, ops, 0, ops.size(), outcome.reference);
    }

    TempDir dir;
    auto store = (dir / "index.rdsse").string();
    State state = fresh_state;
    workload::ShadowDb shadow;
    std::size_t half = ops.size() / 2;
    {
        ServerProcess proc(scheme_arg, store, {"--snapshot-every", "50"});
        net::TcpChannel ch(net::parse_host_port(proc.address()));
        Session s(state, ch);
        s.hello();
        run_ops(s, ops, 0, half, outcome.got, &shadow, &outcome.expected);
        outcome.entries_before_kill = client::query_stats(ch).entries;
        proc.kill_hard();
    }
    {
        ServerProcess proc(scheme_arg, store);
        outcome.restart_banner = proc.banner();
        net::TcpChannel ch(net::parse_host_port(proc.address()));
        Session s(state, ch);
        s.hello();
        run_ops(s, ops, half, ops.size(), outcome.got, &shadow, &outcome.expected);
    }
    return outcome;
}

}  // namespace rdsse::testing
