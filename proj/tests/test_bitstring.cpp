#include <gtest/gtest.h>

#include <random>

#include "rdsse/bitstring.hpp"
#include "rdsse/crypto/paillier.hpp"
#include "rdsse/error.hpp"

using namespace rdsse;
namespace bs = rdsse::bitstring;

TEST(BitString, AddMasks) {
    EXPECT_EQ(bs::encode_add(0, 6), 1);
    EXPECT_EQ(bs::encode_add(4, 6), 16);  // slot y-2
    EXPECT_EQ(bs::encode_add(3, 8), 8);
    EXPECT_THROW(bs::encode_add(5, 6), Error);
}

TEST(BitString, DeleteMasks) {
    EXPECT_EQ(bs::encode_del(0, 6), 63);
    EXPECT_EQ(bs::encode_del(2, 6), 60);
    EXPECT_THROW(bs::encode_del(5, 6), Error);
}

TEST(BitString, Decode) {
    EXPECT_EQ(bs::decode(1, 6), (std::set<std::uint32_t>{0}));
    EXPECT_EQ(bs::decode(64, 6), std::set<std::uint32_t>{});  // 1 + 63
    EXPECT_EQ(bs::decode(0, 6), std::set<std::uint32_t>{});
    EXPECT_EQ(bs::decode(1 + 4 + 16, 6), (std::set<std::uint32_t>{0, 2, 4}));
}

TEST(BitString, MaxSafeUpdates) {
    mpz_class n20 = mpz_class(1) << 20;
    EXPECT_EQ(bs::max_safe_updates(6, n20), 16383);
    // Boundary 2^y = n/2: (n - 2^y) / 2^y = 1 mask of headroom.
    EXPECT_EQ(bs::max_safe_updates(19, n20), 1);
    EXPECT_THROW(bs::max_safe_updates(20, n20), Error);
    mpz_class n2048 = mpz_class(1) << 2047;
    EXPECT_EQ(bs::max_safe_updates(1024, n2048), (mpz_class(1) << 1023) - 1);
}

TEST(BitString, BalancedSequencesMatchSetOracle) {
    // Plain integers: the accumulator grows without a modulus, decode only
    // looks at the low y bits.
    std::mt19937_64 rng(11);
    for (int run = 0; run < 20; ++run) {
        const unsigned y = 6 + static_cast<unsigned>(rng() % 60);
        std::set<std::uint32_t> oracle;
        mpz_class acc = 0;
        const int length = 1 + static_cast<int>(rng() % 10'000 / (run < 2 ? 1 : 10));
        for (int i = 0; i < length; ++i) {
            auto slot = static_cast<std::uint32_t>(rng() % (y - 1));
            if (oracle.contains(slot)) {
                acc += bs::encode_del(slot, y);
                oracle.erase(slot);
            } else {
                acc += bs::encode_add(slot, y);
                oracle.insert(slot);
            }
            ASSERT_EQ(bs::decode(acc, y), oracle) << "y=" << y << " step " << i;
        }
    }
}

TEST(BitString, BalancedSequencesUnderPaillier) {
    auto keys = crypto::PaillierKeypair::generate(crypto::kTestPaillierBits);
    const unsigned y = 480;
    std::mt19937_64 rng(5);
    std::set<std::uint32_t> oracle;
    mpz_class c = crypto::paillier_enc(keys.pub, 0);
    for (int i = 0; i < 400; ++i) {
        auto slot = static_cast<std::uint32_t>(rng() % 40);
        mpz_class mask;
        if (oracle.contains(slot)) {
            mask = bs::encode_del(slot, y);
            oracle.erase(slot);
        } else {
            mask = bs::encode_add(slot, y);
            oracle.insert(slot);
        }
        c = crypto::paillier_add(keys.pub, c, crypto::paillier_enc(keys.pub, mask));
    }
    EXPECT_EQ(bs::decode(crypto::paillier_dec(keys, c), y), oracle);
}
