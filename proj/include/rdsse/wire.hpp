#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rdsse/bytes.hpp"
#include "rdsse/encrypted_index.hpp"
#include "rdsse/error.hpp"
#include "rdsse/scheme_a.hpp"
#include "rdsse/scheme_b.hpp"

namespace rdsse::wire {

enum class MsgType : std::uint8_t {
    kHello = 0x01,
    kUpdateA = 0x10,
    kSearchA = 0x11,
    kResultsA = 0x12,
    kUpdateB = 0x20,
    kCopyB = 0x21,
    kSearchB = 0x22,
    kResultsB = 0x23,
    kStats = 0x30,
    kError = 0x7F,
};

bool is_known(std::uint8_t type);
std::string_view type_name(std::uint8_t type);

inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

/// 1-byte type, 4-byte big-endian length, UTF-8 JSON payload with
/// base64-encoded binary fields.
struct Frame {
    std::uint8_t type = 0;
    std::string payload;

    MsgType msg_type() const { return static_cast<MsgType>(type); }
    friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes encode_frame(const Frame& frame);
/// Decodes one frame from the front of `data`; nullopt if more bytes are
/// needed. Throws kProtocol on an oversized length.
std::optional<Frame> decode_frame(ByteView data, std::size_t& consumed);

struct Hello {
    Scheme scheme = Scheme::kA;
    std::optional<PublicParams> params;
};

struct Stats {
    Scheme scheme = Scheme::kA;
    std::uint64_t entries = 0;
    std::uint64_t anomalies = 0;
};

struct ErrorReply {
    ErrorCode code = ErrorCode::kProtocol;
    std::string message;
};

Frame make_hello(const Hello& hello);
Frame make_update_a(const scheme_a::UpdateMessageA& msg);
Frame make_search_a(const scheme_a::SearchRequestA& req);
Frame make_results_a(const scheme_a::SearchResultA& result);
Frame make_update_b(const scheme_b::UpdateMessageB& msg);
Frame make_copy_b(const scheme_b::CopyMessage& msg);
Frame make_search_b(const Token& ut);
Frame make_results_b(const std::optional<Bytes>& ciphertext);
Frame make_stats_request();
Frame make_stats(const Stats& stats);
Frame make_error(const ErrorReply& err);
/// Mutation acknowledgement: the request type echoed with {"ok":true}.
Frame make_ack(MsgType type);

Hello parse_hello(const Frame& f);
scheme_a::UpdateMessageA parse_update_a(const Frame& f);
scheme_a::SearchRequestA parse_search_a(const Frame& f);
scheme_a::SearchResultA parse_results_a(const Frame& f);
scheme_b::UpdateMessageB parse_update_b(const Frame& f);
scheme_b::CopyMessage parse_copy_b(const Frame& f);
Token parse_search_b(const Frame& f);
std::optional<Bytes> parse_results_b(const Frame& f);
Stats parse_stats(const Frame& f);
ErrorReply parse_error(const Frame& f);
bool is_ack(const Frame& f, MsgType type);

/// Throws the carried Error if `f` is an ERROR frame, or kProtocol if its type
/// is not `expected`.
void expect_type(const Frame& f, MsgType expected);

}  // namespace rdsse::wire
