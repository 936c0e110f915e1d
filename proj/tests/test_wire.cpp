#include <gtest/gtest.h>

#include <random>

#include "rdsse/crypto/paillier.hpp"
#include "rdsse/crypto/tdp.hpp"
#include "rdsse/error.hpp"
#include "rdsse/net.hpp"
#include "rdsse/wire.hpp"

using namespace rdsse;
using namespace rdsse::wire;

namespace {

struct Rand {
    std::mt19937_64 rng{99};
    template <std::size_t N>
    std::array<std::uint8_t, N> arr() {
        std::array<std::uint8_t, N> a;
        for (auto& b : a) b = static_cast<std::uint8_t>(rng());
        return a;
    }
    Bytes bytes(std::size_t max) {
        Bytes b(rng() % (max + 1));
        for (auto& x : b) x = static_cast<std::uint8_t>(rng());
        return b;
    }
    std::uint64_t below(std::uint64_t n) { return rng() % n; }
};

Frame through_bytes(const Frame& f) {
    auto bytes = encode_frame(f);
    EXPECT_EQ(bytes.size(), kHeaderSize + f.payload.size());
    std::size_t used = 0;
    auto back = decode_frame(bytes, used);
    EXPECT_TRUE(back.has_value());
    EXPECT_EQ(used, bytes.size());
    return *back;
}

}  // namespace

TEST(Frame, HeaderLayout) {
    auto bytes = encode_frame({0x22, "abc"});
    ASSERT_EQ(bytes.size(), 8u);
    EXPECT_EQ(bytes[0], 0x22);
    EXPECT_EQ((Bytes{bytes[1], bytes[2], bytes[3], bytes[4]}), (Bytes{0, 0, 0, 3}));
}

TEST(Frame, PartialInputNeedsMoreBytes) {
    auto bytes = encode_frame(make_search_b(Token{}));
    for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
        std::size_t used = 0;
        EXPECT_FALSE(decode_frame(ByteView(bytes).first(cut), used).has_value());
    }
}

TEST(Frame, OversizedLengthIsProtocolError) {
    Bytes bytes{0x10, 0xFF, 0xFF, 0xFF, 0xFF};
    std::size_t used = 0;
    try {
        decode_frame(bytes, used);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kProtocol);
    }
}

TEST(Wire, FuzzedRoundTripTenThousand) {
    Rand r;
    auto tdp = crypto::TdpKeypair::generate(crypto::kTestTdpBits);
    auto pai = crypto::PaillierKeypair::generate(crypto::kTestPaillierBits);
    PublicParams pa{Scheme::kA, tdp.pub, kDocIdSize, {}, 0};
    PublicParams pb{Scheme::kB, {}, kDocIdSize, pai.pub, 480};
    for (int i = 0; i < 10'000; ++i) {
        switch (i % 11) {
            case 0: {
                Hello h{i % 2 ? Scheme::kA : Scheme::kB, std::nullopt};
                if (i % 3) h.params = h.scheme == Scheme::kA ? pa : pb;
                auto back = parse_hello(through_bytes(make_hello(h)));
                ASSERT_EQ(back.scheme, h.scheme);
                ASSERT_EQ(back.params, h.params);
                break;
            }
            case 1: {
                scheme_a::UpdateMessageA m{r.arr<32>(), r.arr<16>()};
                ASSERT_EQ(parse_update_a(through_bytes(make_update_a(m))), m);
                break;
            }
            case 2: {
                scheme_a::SearchRequestA req;
                auto n = r.below(5);
                for (std::uint64_t k = 0; k < n; ++k) {
                    auto from = static_cast<std::int64_t>(r.below(1000));
                    req.segments.push_back({r.arr<32>(), {r.bytes(80)}, from,
                                            static_cast<std::int64_t>(r.below(static_cast<std::uint64_t>(from) + 1))});
                }
                ASSERT_EQ(parse_search_a(through_bytes(make_search_a(req))), req);
                break;
            }
            case 3: {
                scheme_a::SearchResultA res;
                auto n = r.below(20);
                for (std::uint64_t k = 0; k < n; ++k) res.ids.push_back(r.arr<16>());
                res.anomalies = r.below(5);
                auto back = parse_results_a(through_bytes(make_results_a(res)));
                ASSERT_EQ(back.ids, res.ids);
                ASSERT_EQ(back.anomalies, res.anomalies);
                break;
            }
            case 4: {
                scheme_b::UpdateMessageB m{r.arr<32>(), r.bytes(128)};
                ASSERT_EQ(parse_update_b(through_bytes(make_update_b(m))), m);
                break;
            }
            case 5: {
                scheme_b::CopyMessage m{r.arr<32>(), r.arr<32>()};
                ASSERT_EQ(parse_copy_b(through_bytes(make_copy_b(m))), m);
                break;
            }
            case 6: {
                Token t = r.arr<32>();
                ASSERT_EQ(parse_search_b(through_bytes(make_search_b(t))), t);
                break;
            }
            case 7: {
                std::optional<Bytes> c;
                if (i % 2) c = r.bytes(128);
                ASSERT_EQ(parse_results_b(through_bytes(make_results_b(c))), c);
                break;
            }
            case 8: {
                Stats s{i % 2 ? Scheme::kA : Scheme::kB, r.below(1u << 30), r.below(10)};
                auto back = parse_stats(through_bytes(make_stats(s)));
                ASSERT_EQ(back.scheme, s.scheme);
                ASSERT_EQ(back.entries, s.entries);
                ASSERT_EQ(back.anomalies, s.anomalies);
                break;
            }
            case 9: {
                ErrorReply e{static_cast<ErrorCode>(r.below(13)), "msg " + std::to_string(i)};
                auto back = parse_error(through_bytes(make_error(e)));
                ASSERT_EQ(back.code, e.code);
                ASSERT_EQ(back.message, e.message);
                break;
            }
            case 10: {
                auto type = i % 2 ? MsgType::kUpdateA : MsgType::kCopyB;
                ASSERT_TRUE(is_ack(through_bytes(make_ack(type)), type));
                break;
            }
        }
    }
}

TEST(Wire, ErrorFrameRethrowsCarriedCode) {
    auto f = make_error({ErrorCode::kSchemeMismatch, "nope"});
    try {
        expect_type(f, MsgType::kResultsB);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kSchemeMismatch);
        EXPECT_STREQ(e.what(), "nope");
    }
}

TEST(Wire, MalformedPayloadsAreTyped) {
    for (const auto* payload : {"not json", "{}", "{\"ut\": 5}", "{\"ut\": \"AAAA\", \"e\": \"AAAA\"}"}) {
        try {
            parse_update_a({static_cast<std::uint8_t>(MsgType::kUpdateA), payload});
            FAIL() << payload;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::kMalformed) << payload;
        }
    }
}

TEST(ServerDispatch, UnknownTypeGetsProtocolError) {
    EncryptedIndex index(Scheme::kA);
    net::Server server(index);
    auto reply = server.handle({0x55, "{}"});
    ASSERT_EQ(reply.msg_type(), MsgType::kError);
    EXPECT_EQ(parse_error(reply).code, ErrorCode::kProtocol);
}

TEST(ServerDispatch, ClientSideTypesRejected) {
    EncryptedIndex index(Scheme::kB);
    net::Server server(index);
    for (auto t : {MsgType::kResultsA, MsgType::kResultsB, MsgType::kError}) {
        auto reply = server.handle({static_cast<std::uint8_t>(t), "{}"});
        ASSERT_EQ(reply.msg_type(), MsgType::kError);
        EXPECT_EQ(parse_error(reply).code, ErrorCode::kProtocol);
    }
}

TEST(ServerDispatch, SchemeMismatchLeavesStoreUnchanged) {
    auto pai = crypto::PaillierKeypair::generate(crypto::kTestPaillierBits);
    EncryptedIndex index(Scheme::kB);
    net::Server server(index);
    PublicParams pb{Scheme::kB, {}, kDocIdSize, pai.pub, 480};
    ASSERT_EQ(server.handle(make_hello({Scheme::kB, pb})).msg_type(), MsgType::kHello);
    auto reply = server.handle(make_update_a({Token{}, DocId{}}));
    ASSERT_EQ(reply.msg_type(), MsgType::kError);
    EXPECT_EQ(parse_error(reply).code, ErrorCode::kSchemeMismatch);
    EXPECT_EQ(index.size(), 0u);
}

TEST(ServerDispatch, StatsOnFreshStore) {
    EncryptedIndex index(Scheme::kA);
    net::Server server(index);
    auto st = parse_stats(server.handle(make_stats_request()));
    EXPECT_EQ(st.entries, 0u);
    EXPECT_EQ(st.scheme, Scheme::kA);
}

TEST(ServerDispatch, MutationBeforeParamsIsRejected) {
    EncryptedIndex index(Scheme::kA);
    net::Server server(index);
    auto reply = server.handle(make_update_a({Token{}, DocId{}}));
    EXPECT_EQ(reply.msg_type(), MsgType::kError);
    EXPECT_EQ(index.size(), 0u);
}
