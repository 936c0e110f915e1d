#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rdsse/crypto/paillier.hpp"
#include "rdsse/crypto/tdp.hpp"
#include "rdsse/transcript.hpp"

namespace rdsse::audit {

struct HistEntry {
    std::uint64_t t = 0;
    EventOp op = EventOp::kNone;
    DocId ind{};

    friend bool operator==(const HistEntry&, const HistEntry&) = default;
};

/// Timestamps of searches whose cover included n.
std::set<std::uint64_t> sp(const Transcript& tr, NodeLabel n);
/// Chronological updates to node n.
std::vector<HistEntry> hist(const Transcript& tr, NodeLabel n);
/// Earlier search timestamps t' on nodes n' with DB(n) at t contained in
/// DB(n') at t'. Empty when DB(n) at t is empty.
std::set<std::uint64_t> cp(const Transcript& tr, NodeLabel n, std::uint64_t t);

/// Same leakage, maintained one event at a time.
class LeakageTracker {
public:
    void observe(const TranscriptEvent& e);

    std::set<std::uint64_t> sp(NodeLabel n) const;
    std::vector<HistEntry> hist(NodeLabel n) const;
    std::set<std::uint64_t> cp(NodeLabel n, std::uint64_t t) const;

private:
    struct SearchSnapshot {
        std::uint64_t t;
        NodeLabel node;
        std::set<DocId> db;
    };

    std::map<NodeLabel, std::set<std::uint64_t>> sp_;
    std::map<NodeLabel, std::vector<HistEntry>> hist_;
    std::map<std::uint64_t, std::set<DocId>> live_;  // value -> documents
    std::vector<SearchSnapshot> searches_;
    std::map<std::pair<NodeLabel, std::uint64_t>, std::set<std::uint64_t>> cp_;
};

/// cp as the scheme-A server can compute it from plaintext ids in RESULTS_A
/// replies, keyed by event seq.
std::map<std::uint64_t, std::set<std::uint64_t>> server_cp_a(const std::vector<ServerViewEvent>& view);

struct Violation {
    std::string check;
    std::vector<std::uint64_t> seqs;
    std::string detail;
};

/// Token-level checks. They are necessary conditions for the privacy
/// notions, not proofs of them.
struct AuditReport {
    std::string name;
    std::vector<std::string> checks;
    std::vector<Violation> violations;
    std::map<std::string, std::uint64_t> counters;

    bool pass() const { return violations.empty(); }
    std::string render() const;
};

/// (i) every update token is new to the server, including tokens it derived
/// while answering earlier searches; (ii) update payload widths are constant;
/// (iii) an update reveals only its message count.
AuditReport audit_forward_a(const Transcript& tr, const crypto::TdpPublicKey& tdp);

/// (i) one fixed update token per node; (ii) add and delete messages share a
/// format; (iii) search replies decrypt to exactly the live documents, so
/// deleted documents never resurface; (iv) search tokens repeat exactly when
/// the node repeats.
AuditReport audit_backward_b(const Transcript& tr, const crypto::PaillierKeypair& keys, unsigned mask_width);

}  // namespace rdsse::audit
