#include <gtest/gtest.h>

#include <sys/stat.h>

#include <fstream>
#include <random>

#include "rdsse/crypto/tdp.hpp"
#include "rdsse/error.hpp"
#include "rdsse/fileio.hpp"
#include "rdsse/store.hpp"
#include "temp_dir.hpp"

using namespace rdsse;
using rdsse::testing::TempDir;

namespace {

PublicParams params_a() {
    static const auto keys = crypto::TdpKeypair::generate(crypto::kTestTdpBits);
    return {Scheme::kA, keys.pub, kDocIdSize, {}, 0};
}

Token random_token(std::mt19937_64& rng) {
    Token t;
    for (auto& b : t) b = static_cast<std::uint8_t>(rng());
    return t;
}

Bytes random_payload(std::mt19937_64& rng) {
    Bytes b(kDocIdSize);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

void append_bytes(const std::filesystem::path& p, const Bytes& extra) {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    out.write(reinterpret_cast<const char*>(extra.data()), static_cast<std::streamsize>(extra.size()));
}

ErrorCode open_error(const std::filesystem::path& p, Scheme s) {
    try {
        IndexStore::open(p, s);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::kProtocol;  // sentinel: no error
}

}  // namespace

TEST(Store, EmptyRoundTrip) {
    TempDir dir;
    auto path = dir / "s";
    { auto s = IndexStore::open(path, Scheme::kA, {0, false}); }
    auto image = read_store(path);
    EXPECT_EQ(image.scheme, Scheme::kA);
    EXPECT_FALSE(image.params.has_value());
    EXPECT_TRUE(image.entries.empty());
    auto again = IndexStore::open(path, Scheme::kA);
    EXPECT_EQ(again->index().size(), 0u);
}

TEST(Store, FilesArePrivate) {
    TempDir dir;
    auto path = dir / "s";
    { auto s = IndexStore::open(path, Scheme::kA, {0, false}); }
    struct stat st{};
    ASSERT_EQ(::stat(path.c_str(), &st), 0);
    EXPECT_EQ(st.st_mode & 0777, 0600u);
}

TEST(Store, TenThousandPlusThousandRoundTrip) {
    TempDir dir;
    auto path = dir / "s";
    std::mt19937_64 rng(42);
    std::map<Token, Bytes> expect;
    {
        auto s = IndexStore::open(path, Scheme::kA, {0, false});
        s->index().set_params(params_a());
        for (int i = 0; i < 10'000; ++i) {
            auto t = random_token(rng);
            auto p = random_payload(rng);
            s->index().insert_unique(t, p);
            expect[t] = p;
        }
        s->compact();
        EXPECT_EQ(s->log_records(), 0u);
        for (int i = 0; i < 1'000; ++i) {
            auto t = random_token(rng);
            auto p = random_payload(rng);
            s->index().insert_unique(t, p);
            expect[t] = p;
        }
        EXPECT_EQ(s->log_records(), 1000u);
    }
    auto image = read_store(path);
    EXPECT_EQ(image.log_records, 1000u);
    EXPECT_EQ(image.entries, expect);
    EXPECT_EQ(image.params, params_a());
    auto reopened = IndexStore::open(path, Scheme::kA);
    EXPECT_EQ(reopened->index().entries(), expect);
}

TEST(Store, OverwritesReplayInOrder) {
    TempDir dir;
    auto path = dir / "s";
    Token t{};
    {
        auto s = IndexStore::open(path, Scheme::kB, {0, false});
        for (std::uint8_t i = 1; i <= 5; ++i) s->index().mutate(t, [i](const auto&) { return Bytes(4, i); });
    }
    EXPECT_EQ(IndexStore::open(path, Scheme::kB)->index().find(t), Bytes(4, 5));
}

TEST(Store, SnapshotByteFlipIsChecksumError) {
    TempDir dir;
    auto path = dir / "s";
    {
        auto s = IndexStore::open(path, Scheme::kA, {0, false});
        s->index().set_params(params_a());
        std::mt19937_64 rng(1);
        for (int i = 0; i < 50; ++i) s->index().insert_unique(random_token(rng), random_payload(rng));
        s->compact();
    }
    auto data = fileio::read_file(path);
    data[data.size() / 2] ^= 0x40;
    fileio::atomic_write(path, data, false);
    EXPECT_EQ(open_error(path, Scheme::kA), ErrorCode::kChecksumMismatch);
    try {
        read_store(path);
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
    }
}

TEST(Store, LogRecordCorruptionIsChecksumError) {
    TempDir dir;
    auto path = dir / "s";
    {
        auto s = IndexStore::open(path, Scheme::kA, {0, false});
        s->index().set_params(params_a());
        std::mt19937_64 rng(1);
        for (int i = 0; i < 5; ++i) s->index().insert_unique(random_token(rng), random_payload(rng));
    }
    auto data = fileio::read_file(path);
    data[data.size() - 3] ^= 0x01;  // inside the last record's body
    fileio::atomic_write(path, data, false);
    EXPECT_EQ(open_error(path, Scheme::kA), ErrorCode::kChecksumMismatch);
}

TEST(Store, TruncatedTailIsDropped) {
    TempDir dir;
    auto path = dir / "s";
    std::map<Token, Bytes> expect;
    {
        auto s = IndexStore::open(path, Scheme::kA, {0, false});
        s->index().set_params(params_a());
        std::mt19937_64 rng(5);
        for (int i = 0; i < 20; ++i) {
            auto t = random_token(rng);
            auto p = random_payload(rng);
            s->index().insert_unique(t, p);
            expect[t] = p;
        }
    }
    auto full = std::filesystem::file_size(path);
    // A record header promising 53 bytes followed by only 10 of them.
    append_bytes(path, Bytes{0, 0, 0, 53, 1, 2, 3, 4, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    {
        auto s = IndexStore::open(path, Scheme::kA, {0, false});
        EXPECT_TRUE(s->recovered_dropped_tail());
        EXPECT_EQ(s->index().entries(), expect);
        EXPECT_EQ(std::filesystem::file_size(path), full);  // torn bytes cut off
        std::mt19937_64 rng(6);
        auto t = random_token(rng);
        auto p = random_payload(rng);
        s->index().insert_unique(t, p);
        expect[t] = p;
    }
    EXPECT_EQ(IndexStore::open(path, Scheme::kA)->index().entries(), expect);

    // Cutting the file inside the last record's header also drops it.
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - (8 + 1 + 32 + 16) + 3);
    expect.erase(std::prev(expect.end()) == expect.end() ? expect.begin() : expect.begin());
    auto image = read_store(path);
    EXPECT_TRUE(image.dropped_tail);
    EXPECT_EQ(image.entries.size(), 20u);
}

TEST(Store, SchemeMismatch) {
    TempDir dir;
    auto path = dir / "s";
    { auto s = IndexStore::open(path, Scheme::kA); }
    EXPECT_EQ(open_error(path, Scheme::kB), ErrorCode::kSchemeMismatch);
}

TEST(Store, NotAStore) {
    TempDir dir;
    auto path = dir / "s";
    fileio::atomic_write(path, Bytes{'h', 'e', 'l', 'l', 'o'}, false);
    EXPECT_NE(open_error(path, Scheme::kA), ErrorCode::kProtocol);
}

TEST(Store, AutomaticCompaction) {
    TempDir dir;
    auto path = dir / "s";
    auto s = IndexStore::open(path, Scheme::kA, {100, false});
    s->index().set_params(params_a());
    std::mt19937_64 rng(8);
    for (int i = 0; i < 250; ++i) {
        s->index().insert_unique(random_token(rng), random_payload(rng));
        s->maybe_compact();
    }
    EXPECT_LT(s->log_records(), 100u);
    EXPECT_EQ(read_store(path).entries.size(), 250u);
}
