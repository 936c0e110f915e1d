#include "rdsse/session.hpp"

#include "rdsse/error.hpp"

namespace rdsse::client {

namespace {

Bytes payload_bytes(const wire::Frame& f) { return Bytes(f.payload.begin(), f.payload.end()); }

struct Recorder {
    audit::Transcript* tr;
    std::uint64_t t = 0;

    explicit Recorder(audit::Transcript* transcript) : tr(transcript) {
        if (tr) t = tr->begin_operation();
    }

    void record(audit::TranscriptEvent e, const wire::Frame& request, const wire::Frame& reply) {
        if (!tr) return;
        e.t = t;
        e.msg_type = request.type;
        e.wire_bytes = payload_bytes(request);
        e.reply_bytes = payload_bytes(reply);
        tr->record(std::move(e));
    }
};

wire::Frame send_mutation(net::Channel& ch, const wire::Frame& request, wire::MsgType type) {
    auto reply = ch.roundtrip(request);
    wire::expect_type(reply, type);
    if (!wire::is_ack(reply, type)) throw Error(ErrorCode::kProtocol, "mutation was not acknowledged");
    return reply;
}

void exchange_hello(net::Channel& ch, Scheme scheme, const PublicParams& params) {
    auto reply = ch.roundtrip(wire::make_hello({scheme, params}));
    wire::expect_type(reply, wire::MsgType::kHello);
    auto hello = wire::parse_hello(reply);
    if (hello.scheme != scheme || !hello.params || !(*hello.params == params)) {
        throw Error(ErrorCode::kSchemeMismatch, "server holds a different index");
    }
}

std::size_t cover_size(const TreeGeometry& geo, std::uint64_t a, std::uint64_t b) {
    if (geo.empty() || a >= geo.m()) return 0;
    return minimal_cover(a, std::min(b, geo.m() - 1), geo).size();
}

}  // namespace

void SessionA::hello() { exchange_hello(channel_, Scheme::kA, state_.public_params()); }

UpdateOutcome SessionA::add(std::uint64_t v, const DocId& id) {
    UpdateOutcome out;
    out.doublings = scheme_a::extend_domain_a(state_, v);
    auto batch = scheme_a::client_update_a(state_, v, id);
    out.doublings.insert(out.doublings.end(), batch.doublings.begin(), batch.doublings.end());

    Recorder rec(transcript_);
    const auto touched = static_cast<std::uint32_t>(batch.updates.size());
    for (const auto& u : batch.updates) {
        auto request = wire::make_update_a(u.message);
        auto reply = send_mutation(channel_, request, wire::MsgType::kUpdateA);
        ++out.messages;
        audit::TranscriptEvent e;
        e.kind = audit::EventKind::kUpdate;
        e.node = u.node;
        e.op = audit::EventOp::kAdd;
        e.ind = id;
        e.value = v;
        e.keywords_touched = touched;
        rec.record(std::move(e), request, reply);
    }
    return out;
}

SearchOutcome SessionA::search(std::uint64_t a, std::uint64_t b) {
    SearchOutcome out;
    auto requests = scheme_a::client_search_a(state_, a, b);
    out.cover_size = cover_size(state_.geometry(), a, b);

    Recorder rec(transcript_);
    std::vector<scheme_a::SearchResultA> results;
    for (const auto& cr : requests) {
        auto request = wire::make_search_a(cr.request);
        auto reply = channel_.roundtrip(request);
        wire::expect_type(reply, wire::MsgType::kResultsA);
        auto result = wire::parse_results_a(reply);
        ++out.tokens;
        out.anomalies += result.anomalies;
        results.push_back(std::move(result));
        audit::TranscriptEvent e;
        e.kind = audit::EventKind::kSearch;
        e.node = cr.node;
        rec.record(std::move(e), request, reply);
    }
    out.ids = scheme_a::merge_results_a(results);
    return out;
}

void SessionB::hello() { exchange_hello(channel_, Scheme::kB, state_.public_params()); }

UpdateOutcome SessionB::add(std::uint64_t v, const DocId& id) { return update(scheme_b::UpdateOp::kAdd, v, id); }

UpdateOutcome SessionB::del(std::uint64_t v, const DocId& id) { return update(scheme_b::UpdateOp::kDel, v, id); }

UpdateOutcome SessionB::update(scheme_b::UpdateOp op, std::uint64_t v, const DocId& id) {
    UpdateOutcome out;
    std::vector<scheme_b::CopyUpdateB> copies;
    if (v > state_.geometry().m() && op == scheme_b::UpdateOp::kAdd) {
        // Reject before growing so a refused add leaves the domain alone.
        const auto& dir = state_.directory();
        if (auto p = dir.find(id)) {
            throw Error(ErrorCode::kPrecondition, "document " + doc_id_name(id) + " is already live at value " +
                                                      std::to_string(p->value));
        }
        if (dir.live_count() >= dir.capacity()) {
            throw Error(ErrorCode::kCapacityExhausted,
                        "all " + std::to_string(dir.capacity()) + " document slots are in use");
        }
        copies = scheme_b::extend_domain_b(state_, v);
    }
    auto batch = scheme_b::client_update_b(state_, op, v, id);
    copies.insert(copies.end(), batch.copies.begin(), batch.copies.end());
    out.slot = batch.slot;

    Recorder rec(transcript_);
    for (const auto& c : copies) {
        auto request = wire::make_copy_b(c.message);
        auto reply = send_mutation(channel_, request, wire::MsgType::kCopyB);
        ++out.copies;
        out.doublings.push_back(c.doubling);
        audit::TranscriptEvent e;
        e.kind = audit::EventKind::kCopy;
        e.node = c.doubling.new_root;
        rec.record(std::move(e), request, reply);
    }
    const auto touched = static_cast<std::uint32_t>(batch.updates.size());
    for (const auto& u : batch.updates) {
        auto request = wire::make_update_b(u.message);
        auto reply = send_mutation(channel_, request, wire::MsgType::kUpdateB);
        ++out.messages;
        audit::TranscriptEvent e;
        e.kind = audit::EventKind::kUpdate;
        e.node = u.node;
        e.op = op == scheme_b::UpdateOp::kAdd ? audit::EventOp::kAdd : audit::EventOp::kDel;
        e.ind = id;
        e.value = v;
        e.slot = batch.slot;
        e.keywords_touched = touched;
        rec.record(std::move(e), request, reply);
    }
    return out;
}

SearchOutcome SessionB::search(std::uint64_t a, std::uint64_t b) {
    SearchOutcome out;
    auto tokens = scheme_b::client_search_b(state_, a, b);
    out.cover_size = tokens.size();

    Recorder rec(transcript_);
    std::vector<Bytes> ciphertexts;
    for (const auto& tok : tokens) {
        auto request = wire::make_search_b(tok.ut);
        auto reply = channel_.roundtrip(request);
        wire::expect_type(reply, wire::MsgType::kResultsB);
        auto c = wire::parse_results_b(reply);
        ++out.tokens;
        if (c) {
            ciphertexts.push_back(std::move(*c));
            ++out.ciphertexts;
        }
        audit::TranscriptEvent e;
        e.kind = audit::EventKind::kSearch;
        e.node = tok.node;
        rec.record(std::move(e), request, reply);
    }
    out.ids = scheme_b::client_decode_b(state_, ciphertexts);
    return out;
}

wire::Stats query_stats(net::Channel& channel) {
    auto reply = channel.roundtrip(wire::make_stats_request());
    wire::expect_type(reply, wire::MsgType::kStats);
    return wire::parse_stats(reply);
}

}  // namespace rdsse::client
