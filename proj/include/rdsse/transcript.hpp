#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rdsse/bytes.hpp"
#include "rdsse/range_tree.hpp"
#include "rdsse/wire.hpp"

namespace rdsse::audit {

enum class EventKind : std::uint8_t { kSearch = 1, kUpdate = 2, kCopy = 3 };
enum class EventOp : std::uint8_t { kNone = 0, kAdd = 1, kDel = 2 };

/// One client->server message. Everything except seq, t, msg_type and the
/// two byte strings is client-side ground truth the server never sees.
struct TranscriptEvent {
    std::uint64_t seq = 0;  // strictly increasing per event
    std::uint64_t t = 0;    // operation timestamp, shared by one search/update
    EventKind kind = EventKind::kSearch;
    NodeLabel node;
    EventOp op = EventOp::kNone;
    std::optional<DocId> ind;
    std::optional<std::uint64_t> value;
    std::optional<std::uint32_t> slot;  // scheme B bit slot
    std::uint32_t keywords_touched = 0;
    std::uint8_t msg_type = 0;
    Bytes wire_bytes;   // request frame payload, byte for byte
    Bytes reply_bytes;  // reply frame payload

    friend bool operator==(const TranscriptEvent&, const TranscriptEvent&) = default;
};

/// What the honest-but-curious server observes of one event.
struct ServerViewEvent {
    std::uint64_t seq = 0;
    std::uint64_t t = 0;
    std::uint8_t msg_type = 0;
    Bytes wire_bytes;
    Bytes reply_bytes;
};

class Transcript {
public:
    /// Starts a new search or update; returns its timestamp.
    std::uint64_t begin_operation();
    /// Appends an event, assigning seq. Throws kPrecondition if its t is not
    /// the current operation's.
    const TranscriptEvent& record(TranscriptEvent event);

    const std::vector<TranscriptEvent>& events() const { return events_; }
    std::vector<ServerViewEvent> server_view() const;
    std::uint64_t current_t() const { return t_; }

    Bytes serialize() const;
    static Transcript deserialize(ByteView data);

    /// Length-prefixed event records, replaced atomically on save.
    void save(const std::filesystem::path& path) const;
    static Transcript load(const std::filesystem::path& path);

private:
    std::vector<TranscriptEvent> events_;
    std::uint64_t t_ = 0;
};

Bytes encode_event(const TranscriptEvent& e);
TranscriptEvent decode_event(ByteView data);

}  // namespace rdsse::audit
