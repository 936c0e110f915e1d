#include "rdsse/audit.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "rdsse/bitstring.hpp"
#include "rdsse/crypto/bigint.hpp"
#include "rdsse/crypto/prf.hpp"
#include "rdsse/error.hpp"
#include "rdsse/wire.hpp"

namespace rdsse::audit {

namespace {

constexpr std::uint64_t kHugeCapacity = std::uint64_t{1} << 62;

using LiveMap = std::map<std::uint64_t, std::set<DocId>>;

NodeSpan span_of(NodeLabel n) { return node_span(n, kHugeCapacity); }

void apply_update(LiveMap& live, const TranscriptEvent& e) {
    if (e.kind != EventKind::kUpdate || !e.value || !e.ind) return;
    if (e.op == EventOp::kAdd) {
        live[*e.value].insert(*e.ind);
    } else if (e.op == EventOp::kDel) {
        auto it = live.find(*e.value);
        if (it != live.end()) {
            it->second.erase(*e.ind);
            if (it->second.empty()) live.erase(it);
        }
    }
}

std::set<DocId> db_of(const LiveMap& live, NodeLabel n) {
    auto span = span_of(n);
    std::set<DocId> out;
    for (auto it = live.lower_bound(span.lo); it != live.end() && it->first <= span.hi; ++it) {
        out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

bool contains_all(const std::set<DocId>& outer, const std::set<DocId>& inner) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

wire::Frame frame_of(std::uint8_t type, const Bytes& payload) {
    return {type, std::string(payload.begin(), payload.end())};
}

std::set<std::string> json_keys(const Bytes& payload) {
    std::set<std::string> keys;
    auto j = nlohmann::json::parse(payload.begin(), payload.end(), nullptr, false);
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    }
    return keys;
}

std::string short_hex(const Token& t) { return to_hex(view(t)).substr(0, 16); }

}  // namespace

// -- leakage functions ---------------------------------------------------------

std::set<std::uint64_t> sp(const Transcript& tr, NodeLabel n) {
    std::set<std::uint64_t> out;
    for (const auto& e : tr.events()) {
        if (e.kind == EventKind::kSearch && e.node == n) out.insert(e.t);
    }
    return out;
}

std::vector<HistEntry> hist(const Transcript& tr, NodeLabel n) {
    std::vector<HistEntry> out;
    for (const auto& e : tr.events()) {
        if (e.kind == EventKind::kUpdate && e.node == n && e.ind) out.push_back({e.t, e.op, *e.ind});
    }
    return out;
}

std::set<std::uint64_t> cp(const Transcript& tr, NodeLabel n, std::uint64_t t) {
    LiveMap live;
    std::vector<std::pair<std::uint64_t, std::set<DocId>>> earlier;
    std::optional<std::set<DocId>> target;
    for (const auto& e : tr.events()) {
        if (e.t > t) break;
        if (e.kind == EventKind::kUpdate) apply_update(live, e);
        if (e.kind != EventKind::kSearch) continue;
        if (e.t == t) {
            if (e.node == n) target = db_of(live, n);
        } else {
            earlier.emplace_back(e.t, db_of(live, e.node));
        }
    }
    std::set<std::uint64_t> out;
    if (!target || target->empty()) return out;
    for (const auto& [when, db] : earlier) {
        if (contains_all(db, *target)) out.insert(when);
    }
    return out;
}

void LeakageTracker::observe(const TranscriptEvent& e) {
    if (e.kind == EventKind::kUpdate) {
        apply_update(live_, e);
        if (e.ind) hist_[e.node].push_back({e.t, e.op, *e.ind});
        return;
    }
    if (e.kind != EventKind::kSearch) return;
    sp_[e.node].insert(e.t);
    auto db = db_of(live_, e.node);
    auto& out = cp_[{e.node, e.t}];
    if (!db.empty()) {
        for (const auto& s : searches_) {
            if (s.t < e.t && contains_all(s.db, db)) out.insert(s.t);
        }
    }
    searches_.push_back({e.t, e.node, std::move(db)});
}

std::set<std::uint64_t> LeakageTracker::sp(NodeLabel n) const {
    auto it = sp_.find(n);
    return it == sp_.end() ? std::set<std::uint64_t>{} : it->second;
}

std::vector<HistEntry> LeakageTracker::hist(NodeLabel n) const {
    auto it = hist_.find(n);
    return it == hist_.end() ? std::vector<HistEntry>{} : it->second;
}

std::set<std::uint64_t> LeakageTracker::cp(NodeLabel n, std::uint64_t t) const {
    auto it = cp_.find({n, t});
    return it == cp_.end() ? std::set<std::uint64_t>{} : it->second;
}

std::map<std::uint64_t, std::set<std::uint64_t>> server_cp_a(const std::vector<ServerViewEvent>& view) {
    std::vector<std::pair<std::uint64_t, std::set<DocId>>> seen;
    std::map<std::uint64_t, std::set<std::uint64_t>> out;
    for (const auto& e : view) {
        if (e.msg_type != static_cast<std::uint8_t>(wire::MsgType::kSearchA)) continue;
        std::set<DocId> result;
        try {
            auto r = wire::parse_results_a(frame_of(static_cast<std::uint8_t>(wire::MsgType::kResultsA),
                                                    e.reply_bytes));
            result.insert(r.ids.begin(), r.ids.end());
        } catch (const Error&) {
            continue;
        }
        auto& cps = out[e.seq];
        if (!result.empty()) {
            for (const auto& [when, earlier] : seen) {
                if (when < e.t && contains_all(earlier, result)) cps.insert(when);
            }
        }
        seen.emplace_back(e.t, std::move(result));
    }
    return out;
}

// -- reports ---------------------------------------------------------------------

std::string AuditReport::render() const {
    std::ostringstream out;
    out << name << ": " << (pass() ? "PASS" : "FAIL") << " (token-level checks: necessary, not sufficient)\n";
    for (const auto& c : checks) out << "  check  " << c << '\n';
    for (const auto& [k, v] : counters) out << "  count  " << k << " = " << v << '\n';
    for (const auto& v : violations) {
        out << "  VIOLATION " << v.check << " at seq";
        for (auto s : v.seqs) out << ' ' << s;
        out << ": " << v.detail << '\n';
    }
    return out.str();
}

AuditReport audit_forward_a(const Transcript& tr, const crypto::TdpPublicKey& tdp) {
    AuditReport report;
    report.name = "audit_forward_a";
    report.checks = {"update tokens never previously observable by the server",
                     "constant update payload width",
                     "update reveals only its message count (mu_i)"};
    const std::uint8_t update_type = static_cast<std::uint8_t>(wire::MsgType::kUpdateA);
    const std::uint8_t search_type = static_cast<std::uint8_t>(wire::MsgType::kSearchA);
    const std::set<std::string> update_keys{"e", "ut"};

    std::map<Token, std::uint64_t> observed;
    std::optional<std::size_t> width;
    std::map<std::uint64_t, std::vector<std::uint64_t>> groups;
    std::map<std::uint64_t, std::uint32_t> touched;
    std::uint64_t derived = 0;

    for (const auto& e : tr.events()) {
        if (e.msg_type == update_type) {
            ++report.counters["updates"];
            scheme_a::UpdateMessageA msg;
            try {
                msg = wire::parse_update_a(frame_of(e.msg_type, e.wire_bytes));
            } catch (const Error& err) {
                report.violations.push_back({"update_format", {e.seq}, err.what()});
                continue;
            }
            if (json_keys(e.wire_bytes) != update_keys) {
                report.violations.push_back({"update_format", {e.seq}, "unexpected fields in UPDATE_A"});
            }
            if (auto it = observed.find(msg.ut); it != observed.end()) {
                report.violations.push_back({"token_freshness", {it->second, e.seq},
                                             "update token " + short_hex(msg.ut) +
                                                 "... was already observable by the server"});
            } else {
                observed.emplace(msg.ut, e.seq);
            }
            if (!width) width = e.wire_bytes.size();
            if (*width != e.wire_bytes.size()) {
                report.violations.push_back({"payload_width", {e.seq},
                                             "payload is " + std::to_string(e.wire_bytes.size()) +
                                                 " bytes, expected " + std::to_string(*width)});
            }
            groups[e.t].push_back(e.seq);
            auto [it, fresh] = touched.emplace(e.t, e.keywords_touched);
            if (!fresh && it->second != e.keywords_touched) {
                report.violations.push_back({"update_structure", {e.seq}, "inconsistent keywords_touched"});
            }
        } else if (e.msg_type == search_type) {
            ++report.counters["searches"];
            scheme_a::SearchRequestA req;
            try {
                req = wire::parse_search_a(frame_of(e.msg_type, e.wire_bytes));
            } catch (const Error& err) {
                report.violations.push_back({"search_format", {e.seq}, err.what()});
                continue;
            }
            for (const auto& seg : req.segments) {
                crypto::SearchToken st = seg.head;
                for (std::int64_t i = seg.from_counter; i >= seg.to_counter && i >= 0; --i) {
                    observed.emplace(crypto::h1(seg.key, st.bytes), e.seq);
                    ++derived;
                    if (i > seg.to_counter) st = crypto::tdp_forward(tdp, st);
                }
            }
        }
    }
    for (const auto& [t, seqs] : groups) {
        if (seqs.size() != touched[t]) {
            report.violations.push_back({"update_structure", seqs,
                                         "operation at t=" + std::to_string(t) + " sent " +
                                             std::to_string(seqs.size()) + " messages for mu=" +
                                             std::to_string(touched[t])});
        }
    }
    report.counters["derived_tokens"] = derived;
    report.counters["update_operations"] = groups.size();
    return report;
}

AuditReport audit_backward_b(const Transcript& tr, const crypto::PaillierKeypair& keys, unsigned mask_width) {
    AuditReport report;
    report.name = "audit_backward_b";
    report.checks = {"one fixed update token per node",
                     "add and delete messages are format-indistinguishable",
                     "search replies hold exactly the live documents (deleted documents absent)",
                     "search tokens repeat exactly when the node repeats"};
    const auto update_type = static_cast<std::uint8_t>(wire::MsgType::kUpdateB);
    const auto copy_type = static_cast<std::uint8_t>(wire::MsgType::kCopyB);
    const auto search_type = static_cast<std::uint8_t>(wire::MsgType::kSearchB);
    const auto results_type = static_cast<std::uint8_t>(wire::MsgType::kResultsB);
    const std::set<std::string> update_keys{"e", "ut"};

    std::map<NodeLabel, Token> node_token;
    std::map<Token, NodeLabel> token_node;
    auto bind = [&](NodeLabel n, const Token& t, std::uint64_t seq) {
        auto [it, fresh] = node_token.emplace(n, t);
        if (!fresh && it->second != t) {
            report.violations.push_back({"fixed_token", {seq},
                                         "node " + std::to_string(n.value) + " seen under two tokens"});
        }
        auto [jt, fresh2] = token_node.emplace(t, n);
        if (!fresh2 && jt->second != n) {
            report.violations.push_back({"token_linkage", {seq},
                                         "token " + short_hex(t) + "... shared by nodes " +
                                             std::to_string(jt->second.value) + " and " +
                                             std::to_string(n.value)});
        }
    };

    std::map<EventOp, std::set<std::size_t>> widths;
    std::set<Bytes> ciphertexts;
    std::map<std::uint64_t, std::map<DocId, std::uint32_t>> live;  // value -> doc -> slot
    std::map<DocId, std::pair<std::uint64_t, std::uint32_t>> deleted;
    std::set<std::uint64_t> seen_ops;

    for (const auto& e : tr.events()) {
        if (e.msg_type == update_type) {
            ++report.counters["update_messages"];
            scheme_b::UpdateMessageB msg;
            try {
                msg = wire::parse_update_b(frame_of(e.msg_type, e.wire_bytes));
            } catch (const Error& err) {
                report.violations.push_back({"update_format", {e.seq}, err.what()});
                continue;
            }
            bind(e.node, msg.ut, e.seq);
            if (json_keys(e.wire_bytes) != update_keys) {
                report.violations.push_back({"op_hiding", {e.seq}, "unexpected fields in UPDATE_B"});
            }
            widths[e.op].insert(e.wire_bytes.size());
            if (!ciphertexts.insert(msg.e).second) {
                report.violations.push_back({"ciphertext_reuse", {e.seq}, "identical ciphertext sent twice"});
            }
            if (e.ind && e.value && e.slot) {
                if (e.op == EventOp::kAdd) {
                    live[*e.value][*e.ind] = *e.slot;
                    deleted.erase(*e.ind);
                } else if (e.op == EventOp::kDel) {
                    live[*e.value].erase(*e.ind);
                    deleted[*e.ind] = {*e.value, *e.slot};
                }
                if (seen_ops.insert(e.t).second) {
                    ++report.counters[e.op == EventOp::kAdd ? "add_operations" : "delete_operations"];
                }
            }
        } else if (e.msg_type == copy_type) {
            ++report.counters["copy_messages"];
            try {
                auto msg = wire::parse_copy_b(frame_of(e.msg_type, e.wire_bytes));
                bind(e.node, msg.dst, e.seq);
                bind(NodeLabel{(e.node.value - 1) / 2}, msg.src, e.seq);
            } catch (const Error& err) {
                report.violations.push_back({"copy_format", {e.seq}, err.what()});
            }
        } else if (e.msg_type == search_type) {
            ++report.counters["search_messages"];
            Token ut;
            std::optional<Bytes> reply;
            try {
                ut = wire::parse_search_b(frame_of(e.msg_type, e.wire_bytes));
                reply = wire::parse_results_b(frame_of(results_type, e.reply_bytes));
            } catch (const Error& err) {
                report.violations.push_back({"search_format", {e.seq}, err.what()});
                continue;
            }
            bind(e.node, ut, e.seq);

            auto span = span_of(e.node);
            std::map<std::uint32_t, DocId> expected;
            for (auto it = live.lower_bound(span.lo); it != live.end() && it->first <= span.hi; ++it) {
                for (const auto& [doc, slot] : it->second) expected[slot] = doc;
            }
            std::set<std::uint32_t> decoded;
            if (reply) {
                try {
                    auto c = crypto::decode_ciphertext(keys.pub, *reply);
                    decoded = bitstring::decode(crypto::paillier_dec(keys, c), mask_width);
                } catch (const Error& err) {
                    report.violations.push_back({"search_reply", {e.seq}, err.what()});
                    continue;
                }
            }
            for (const auto& [doc, where] : deleted) {
                if (where.first < span.lo || where.first > span.hi) continue;
                ++report.counters["deleted_docs_checked"];
                if (decoded.contains(where.second) && !expected.contains(where.second)) {
                    report.violations.push_back({"deleted_doc_resurfaced", {e.seq},
                                                 "deleted document " + doc_id_name(doc) +
                                                     " decodes from node " + std::to_string(e.node.value)});
                }
            }
            std::set<std::uint32_t> expected_slots;
            for (const auto& [slot, _] : expected) expected_slots.insert(slot);
            if (decoded != expected_slots) {
                report.violations.push_back({"search_reply", {e.seq},
                                             "node " + std::to_string(e.node.value) + " decodes to " +
                                                 std::to_string(decoded.size()) + " slots, expected " +
                                                 std::to_string(expected_slots.size())});
            }
            ++report.counters["replies_checked"];
        }
    }
    std::set<std::size_t> all_widths;
    for (const auto& [op, ws] : widths) all_widths.insert(ws.begin(), ws.end());
    if (all_widths.size() > 1) {
        report.violations.push_back({"op_hiding", {}, "update payload widths differ across messages"});
    }
    report.counters["distinct_tokens"] = token_node.size();
    return report;
}

}  // namespace rdsse::audit
