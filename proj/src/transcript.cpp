#include "rdsse/transcript.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "rdsse/error.hpp"

namespace rdsse::audit {

namespace {

constexpr std::uint8_t kHasInd = 1;
constexpr std::uint8_t kHasValue = 2;
constexpr std::uint8_t kHasSlot = 4;

}  // namespace

std::uint64_t Transcript::begin_operation() { return ++t_; }

const TranscriptEvent& Transcript::record(TranscriptEvent event) {
    if (t_ == 0 || event.t != t_) {
        throw Error(ErrorCode::kPrecondition, "event timestamp " + std::to_string(event.t) +
                                                  " is not the current operation " + std::to_string(t_));
    }
    event.seq = events_.empty() ? 1 : events_.back().seq + 1;
    events_.push_back(std::move(event));
    return events_.back();
}

std::vector<ServerViewEvent> Transcript::server_view() const {
    std::vector<ServerViewEvent> out;
    out.reserve(events_.size());
    for (const auto& e : events_) {
        out.push_back({e.seq, e.t, e.msg_type, e.wire_bytes, e.reply_bytes});
    }
    return out;
}

Bytes encode_event(const TranscriptEvent& e) {
    Bytes out;
    put_u64(out, e.seq);
    put_u64(out, e.t);
    put_u8(out, static_cast<std::uint8_t>(e.kind));
    put_u64(out, e.node.value);
    put_u8(out, static_cast<std::uint8_t>(e.op));
    std::uint8_t flags = (e.ind ? kHasInd : 0) | (e.value ? kHasValue : 0) | (e.slot ? kHasSlot : 0);
    put_u8(out, flags);
    if (e.ind) put_bytes(out, view(*e.ind));
    if (e.value) put_u64(out, *e.value);
    if (e.slot) put_u32(out, *e.slot);
    put_u32(out, e.keywords_touched);
    put_u8(out, e.msg_type);
    put_blob(out, e.wire_bytes);
    put_blob(out, e.reply_bytes);
    return out;
}

TranscriptEvent decode_event(ByteView data) {
    ByteReader in(data);
    TranscriptEvent e;
    e.seq = in.u64();
    e.t = in.u64();
    auto kind = in.u8();
    if (kind < 1 || kind > 3) throw Error(ErrorCode::kMalformed, "bad transcript event kind");
    e.kind = static_cast<EventKind>(kind);
    e.node = NodeLabel{in.u64()};
    auto op = in.u8();
    if (op > 2) throw Error(ErrorCode::kMalformed, "bad transcript event op");
    e.op = static_cast<EventOp>(op);
    auto flags = in.u8();
    if (flags & kHasInd) e.ind = doc_id_from(in.bytes(kDocIdSize));
    if (flags & kHasValue) e.value = in.u64();
    if (flags & kHasSlot) e.slot = in.u32();
    e.keywords_touched = in.u32();
    e.msg_type = in.u8();
    auto wire = in.blob();
    e.wire_bytes.assign(wire.begin(), wire.end());
    auto reply = in.blob();
    e.reply_bytes.assign(reply.begin(), reply.end());
    if (!in.done()) throw Error(ErrorCode::kMalformed, "trailing bytes in transcript event");
    return e;
}

Bytes Transcript::serialize() const {
    Bytes out;
    for (const auto& e : events_) put_blob(out, encode_event(e));
    return out;
}

Transcript Transcript::deserialize(ByteView data) {
    Transcript tr;
    ByteReader in(data);
    while (!in.done()) {
        auto e = decode_event(in.blob());
        if (!tr.events_.empty() && (e.seq <= tr.events_.back().seq || e.t < tr.events_.back().t)) {
            throw Error(ErrorCode::kMalformed, "transcript events out of order");
        }
        tr.t_ = e.t;
        tr.events_.push_back(std::move(e));
    }
    return tr;
}

void Transcript::save(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        Bytes data = serialize();
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw Error(ErrorCode::kIo, "cannot write transcript " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Transcript Transcript::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open transcript " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(data);
}

}  // namespace rdsse::audit
