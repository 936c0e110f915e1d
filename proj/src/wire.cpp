#include "rdsse/wire.hpp"

#include "json.hpp"

#include <array>

namespace rdsse::wire {

using nlohmann::json;

namespace {

constexpr std::array<ErrorCode, 13> kAllCodes = {
    ErrorCode::kInvalidArgument, ErrorCode::kOutOfRange,        ErrorCode::kPrecondition,
    ErrorCode::kCapacityExhausted, ErrorCode::kDuplicateToken,  ErrorCode::kDestinationExists,
    ErrorCode::kMalformed,       ErrorCode::kSchemeMismatch,    ErrorCode::kChecksumMismatch,
    ErrorCode::kIo,              ErrorCode::kProtocol,          ErrorCode::kUnsupported,
    ErrorCode::kCrypto,
};

Frame frame(MsgType type, const json& body) { return {static_cast<std::uint8_t>(type), body.dump()}; }

json body_of(const Frame& f, MsgType expected) {
    expect_type(f, expected);
    try {
        return json::parse(f.payload);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformed, std::string("bad frame payload: ") + e.what());
    }
}

template <typename T>
T field(const json& j, const char* name) {
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformed, std::string("field '") + name + "': " + e.what());
    }
}

std::string b64(ByteView data) { return base64_encode(data); }
Bytes unb64(const json& j, const char* name) { return base64_decode(field<std::string>(j, name)); }

}  // namespace

bool is_known(std::uint8_t type) {
    switch (static_cast<MsgType>(type)) {
        case MsgType::kHello:
        case MsgType::kUpdateA:
        case MsgType::kSearchA:
        case MsgType::kResultsA:
        case MsgType::kUpdateB:
        case MsgType::kCopyB:
        case MsgType::kSearchB:
        case MsgType::kResultsB:
        case MsgType::kStats:
        case MsgType::kError:
            return true;
    }
    return false;
}

std::string_view type_name(std::uint8_t type) {
    switch (static_cast<MsgType>(type)) {
        case MsgType::kHello: return "HELLO";
        case MsgType::kUpdateA: return "UPDATE_A";
        case MsgType::kSearchA: return "SEARCH_A";
        case MsgType::kResultsA: return "RESULTS_A";
        case MsgType::kUpdateB: return "UPDATE_B";
        case MsgType::kCopyB: return "COPY_B";
        case MsgType::kSearchB: return "SEARCH_B";
        case MsgType::kResultsB: return "RESULTS_B";
        case MsgType::kStats: return "STATS";
        case MsgType::kError: return "ERROR";
    }
    return "UNKNOWN";
}

Bytes encode_frame(const Frame& f) {
    if (f.payload.size() > kMaxPayload) throw Error(ErrorCode::kProtocol, "frame payload too large");
    Bytes out;
    out.reserve(kHeaderSize + f.payload.size());
    put_u8(out, f.type);
    put_u32(out, static_cast<std::uint32_t>(f.payload.size()));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

std::optional<Frame> decode_frame(ByteView data, std::size_t& consumed) {
    consumed = 0;
    if (data.size() < kHeaderSize) return std::nullopt;
    ByteReader in(data);
    Frame f;
    f.type = in.u8();
    std::uint32_t len = in.u32();
    if (len > kMaxPayload) throw Error(ErrorCode::kProtocol, "frame payload too large");
    if (in.remaining() < len) return std::nullopt;
    auto body = in.bytes(len);
    f.payload.assign(body.begin(), body.end());
    consumed = kHeaderSize + len;
    return f;
}

void expect_type(const Frame& f, MsgType expected) {
    if (f.msg_type() == MsgType::kError && expected != MsgType::kError) {
        auto err = parse_error(f);
        throw Error(err.code, err.message);
    }
    if (f.msg_type() != expected) {
        throw Error(ErrorCode::kProtocol, "expected " + std::string(type_name(static_cast<std::uint8_t>(expected))) +
                                              ", got " + std::string(type_name(f.type)));
    }
}

Frame make_hello(const Hello& hello) {
    json j{{"scheme", scheme_name(hello.scheme)}};
    j["params"] = hello.params ? json(b64(hello.params->encode())) : json(nullptr);
    return frame(MsgType::kHello, j);
}

Hello parse_hello(const Frame& f) {
    json j = body_of(f, MsgType::kHello);
    Hello h;
    h.scheme = parse_scheme(field<std::string>(j, "scheme"));
    if (j.contains("params") && !j["params"].is_null()) {
        h.params = PublicParams::decode(unb64(j, "params"));
    }
    return h;
}

Frame make_update_a(const scheme_a::UpdateMessageA& msg) {
    return frame(MsgType::kUpdateA, {{"ut", b64(view(msg.ut))}, {"e", b64(view(msg.e))}});
}

scheme_a::UpdateMessageA parse_update_a(const Frame& f) {
    json j = body_of(f, MsgType::kUpdateA);
    return {token_from(unb64(j, "ut")), doc_id_from(unb64(j, "e"))};
}

Frame make_search_a(const scheme_a::SearchRequestA& req) {
    json segs = json::array();
    for (const auto& s : req.segments) {
        segs.push_back({{"k", b64(view(s.key))},
                        {"st", b64(view(s.head.bytes))},
                        {"from", s.from_counter},
                        {"to", s.to_counter}});
    }
    return frame(MsgType::kSearchA, {{"segments", segs}});
}

scheme_a::SearchRequestA parse_search_a(const Frame& f) {
    json j = body_of(f, MsgType::kSearchA);
    scheme_a::SearchRequestA req;
    for (const auto& s : field<json>(j, "segments")) {
        req.segments.push_back({token_from(unb64(s, "k")), {unb64(s, "st")},
                                field<std::int64_t>(s, "from"), field<std::int64_t>(s, "to")});
    }
    return req;
}

Frame make_results_a(const scheme_a::SearchResultA& result) {
    json ids = json::array();
    for (const auto& id : result.ids) ids.push_back(b64(view(id)));
    return frame(MsgType::kResultsA,
                 {{"ids", ids}, {"count", result.ids.size()}, {"anomalies", result.anomalies}});
}

scheme_a::SearchResultA parse_results_a(const Frame& f) {
    json j = body_of(f, MsgType::kResultsA);
    scheme_a::SearchResultA r;
    for (const auto& id : field<json>(j, "ids")) {
        r.ids.push_back(doc_id_from(base64_decode(id.get<std::string>())));
    }
    if (field<std::size_t>(j, "count") != r.ids.size()) {
        throw Error(ErrorCode::kMalformed, "RESULTS_A count does not match ids");
    }
    r.anomalies = field<std::uint64_t>(j, "anomalies");
    return r;
}

Frame make_update_b(const scheme_b::UpdateMessageB& msg) {
    return frame(MsgType::kUpdateB, {{"ut", b64(view(msg.ut))}, {"e", b64(msg.e)}});
}

scheme_b::UpdateMessageB parse_update_b(const Frame& f) {
    json j = body_of(f, MsgType::kUpdateB);
    return {token_from(unb64(j, "ut")), unb64(j, "e")};
}

Frame make_copy_b(const scheme_b::CopyMessage& msg) {
    return frame(MsgType::kCopyB, {{"src", b64(view(msg.src))}, {"dst", b64(view(msg.dst))}});
}

scheme_b::CopyMessage parse_copy_b(const Frame& f) {
    json j = body_of(f, MsgType::kCopyB);
    return {token_from(unb64(j, "src")), token_from(unb64(j, "dst"))};
}

Frame make_search_b(const Token& ut) { return frame(MsgType::kSearchB, {{"ut", b64(view(ut))}}); }

Token parse_search_b(const Frame& f) { return token_from(unb64(body_of(f, MsgType::kSearchB), "ut")); }

Frame make_results_b(const std::optional<Bytes>& ciphertext) {
    return frame(MsgType::kResultsB, {{"e", ciphertext ? json(b64(*ciphertext)) : json(nullptr)}});
}

std::optional<Bytes> parse_results_b(const Frame& f) {
    json j = body_of(f, MsgType::kResultsB);
    if (!j.contains("e") || j["e"].is_null()) return std::nullopt;
    return unb64(j, "e");
}

Frame make_stats_request() { return frame(MsgType::kStats, json::object()); }

Frame make_stats(const Stats& stats) {
    return frame(MsgType::kStats, {{"scheme", scheme_name(stats.scheme)},
                                   {"entries", stats.entries},
                                   {"anomalies", stats.anomalies}});
}

Stats parse_stats(const Frame& f) {
    json j = body_of(f, MsgType::kStats);
    return {parse_scheme(field<std::string>(j, "scheme")), field<std::uint64_t>(j, "entries"),
            field<std::uint64_t>(j, "anomalies")};
}

Frame make_error(const ErrorReply& err) {
    return frame(MsgType::kError, {{"code", error_code_name(err.code)}, {"message", err.message}});
}

ErrorReply parse_error(const Frame& f) {
    if (f.msg_type() != MsgType::kError) throw Error(ErrorCode::kProtocol, "not an ERROR frame");
    json j;
    try {
        j = json::parse(f.payload);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformed, std::string("bad ERROR payload: ") + e.what());
    }
    ErrorReply r;
    auto name = field<std::string>(j, "code");
    r.code = ErrorCode::kProtocol;
    for (auto c : kAllCodes) {
        if (error_code_name(c) == name) r.code = c;
    }
    r.message = field<std::string>(j, "message");
    return r;
}

Frame make_ack(MsgType type) { return frame(type, {{"ok", true}}); }

bool is_ack(const Frame& f, MsgType type) {
    expect_type(f, type);
    json j = json::parse(f.payload, nullptr, false);
    return j.is_object() && j.value("ok", false);
}

}  // namespace rdsse::wire
