#include "rdsse/keystore.hpp"

#include <cstring>

#include "rdsse/crypto/bigint.hpp"
#include "rdsse/error.hpp"
#include "rdsse/fileio.hpp"

namespace rdsse::keystore {

namespace {

constexpr std::size_t kMagicLen = sizeof(kKeystoreMagic) - 1;

void put_mpz(Bytes& out, const mpz_class& v) { put_blob(out, crypto::to_bytes(v)); }
mpz_class get_mpz(ByteReader& in) { return crypto::from_bytes(in.blob()); }

void put_i64(Bytes& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }
std::int64_t get_i64(ByteReader& in) { return static_cast<std::int64_t>(in.u64()); }

Bytes header(Scheme scheme) {
    Bytes out(kKeystoreMagic, kKeystoreMagic + kMagicLen);
    put_u8(out, kKeystoreVersion);
    put_u8(out, static_cast<std::uint8_t>(scheme));
    return out;
}

void seal(Bytes& out) { put_u32(out, fileio::crc32_of(out)); }

/// Validates magic, version, scheme and CRC; returns a reader over the body.
ByteView open_body(ByteView data, Scheme expected) {
    if (data.size() < kMagicLen + 2 + 4 || std::memcmp(data.data(), kKeystoreMagic, kMagicLen) != 0) {
        throw Error(ErrorCode::kMalformed, "not a keystore file");
    }
    auto body_end = data.size() - 4;
    ByteReader tail(data.subspan(body_end));
    if (fileio::crc32_of(data.first(body_end)) != tail.u32()) {
        throw Error(ErrorCode::kChecksumMismatch, "keystore checksum mismatch");
    }
    if (data[kMagicLen] != kKeystoreVersion) {
        throw Error(ErrorCode::kUnsupported, "keystore version " + std::to_string(data[kMagicLen]));
    }
    auto scheme = static_cast<Scheme>(data[kMagicLen + 1]);
    if (scheme != expected) {
        throw Error(ErrorCode::kSchemeMismatch, "keystore holds scheme " + std::string(scheme_name(scheme)));
    }
    return data.subspan(kMagicLen + 2, body_end - kMagicLen - 2);
}

crypto::PrfKey get_prf(ByteReader& in) {
    crypto::PrfKey key;
    auto raw = in.bytes(key.bytes.size());
    std::copy(raw.begin(), raw.end(), key.bytes.begin());
    return key;
}

void finish(const ByteReader& in) {
    if (!in.done()) throw Error(ErrorCode::kMalformed, "trailing bytes in keystore");
}

}  // namespace

Bytes encode_a(const scheme_a::ClientStateA& state) {
    Bytes out = header(Scheme::kA);
    put_bytes(out, state.prf_key().bytes);
    put_mpz(out, state.tdp().sec.p);
    put_mpz(out, state.tdp().sec.q);
    put_mpz(out, state.tdp().pub.exponent);
    put_u64(out, state.geometry().m());
    put_u32(out, static_cast<std::uint32_t>(state.chains().size()));
    for (const auto& [label, chain] : state.chains()) {
        put_u64(out, label.value);
        put_u8(out, chain.own_head ? 1 : 0);
        if (chain.own_head) put_blob(out, chain.own_head->bytes);
        put_i64(out, chain.own_counter);
        put_u32(out, static_cast<std::uint32_t>(chain.inherited.size()));
        for (const auto& seg : chain.inherited) {
            put_u64(out, seg.key_label.value);
            put_blob(out, seg.head_st.bytes);
            put_i64(out, seg.from_counter);
            put_i64(out, seg.to_counter);
        }
    }
    seal(out);
    return out;
}

scheme_a::ClientStateA decode_a(ByteView data) {
    ByteReader in(open_body(data, Scheme::kA));
    auto prf = get_prf(in);
    auto p = get_mpz(in);
    auto q = get_mpz(in);
    auto e = get_mpz(in);
    TreeGeometry geo(in.u64());
    std::map<NodeLabel, scheme_a::NodeChain> chains;
    auto nodes = in.u32();
    for (std::uint32_t i = 0; i < nodes; ++i) {
        NodeLabel label{in.u64()};
        scheme_a::NodeChain chain;
        if (in.u8() != 0) {
            auto raw = in.blob();
            chain.own_head = crypto::SearchToken{Bytes(raw.begin(), raw.end())};
        }
        chain.own_counter = get_i64(in);
        auto segs = in.u32();
        for (std::uint32_t k = 0; k < segs; ++k) {
            scheme_a::ChainSegment seg;
            seg.key_label = NodeLabel{in.u64()};
            auto raw = in.blob();
            seg.head_st = crypto::SearchToken{Bytes(raw.begin(), raw.end())};
            seg.from_counter = get_i64(in);
            seg.to_counter = get_i64(in);
            chain.inherited.push_back(std::move(seg));
        }
        chains.emplace(label, std::move(chain));
    }
    finish(in);
    return scheme_a::ClientStateA(prf, crypto::TdpKeypair::from_primes(p, q, e), geo, std::move(chains));
}

Bytes encode_b(const scheme_b::ClientStateB& state) {
    Bytes out = header(Scheme::kB);
    put_bytes(out, state.prf_key().bytes);
    put_mpz(out, state.paillier().sec.p);
    put_mpz(out, state.paillier().sec.q);
    put_u32(out, state.mask_width());
    put_u64(out, state.geometry().m());
    const auto& live = state.directory().live();
    put_u32(out, static_cast<std::uint32_t>(live.size()));
    for (const auto& [id, place] : live) {
        put_bytes(out, view(id));
        put_u32(out, place.slot);
        put_u64(out, place.value);
    }
    seal(out);
    return out;
}

scheme_b::ClientStateB decode_b(ByteView data) {
    ByteReader in(open_body(data, Scheme::kB));
    auto prf = get_prf(in);
    auto p = get_mpz(in);
    auto q = get_mpz(in);
    auto width = in.u32();
    TreeGeometry geo(in.u64());
    scheme_b::DocDirectory dir(width);
    auto docs = in.u32();
    for (std::uint32_t i = 0; i < docs; ++i) {
        auto id = doc_id_from(in.bytes(kDocIdSize));
        scheme_b::Placement place;
        place.slot = in.u32();
        place.value = in.u64();
        dir.restore(id, place);
    }
    finish(in);
    return scheme_b::ClientStateB(prf, crypto::PaillierKeypair::from_primes(p, q), width, geo, std::move(dir));
}

Scheme probe(const std::filesystem::path& path) {
    auto data = read_file(path);
    if (data.size() < kMagicLen + 2 || std::memcmp(data.data(), kKeystoreMagic, kMagicLen) != 0) {
        throw Error(ErrorCode::kMalformed, path.string() + " is not a keystore file");
    }
    return parse_scheme(std::string(1, static_cast<char>(data[kMagicLen + 1])));
}

void save(const std::filesystem::path& path, const scheme_a::ClientStateA& state) {
    write_private_file(path, encode_a(state));
}

void save(const std::filesystem::path& path, const scheme_b::ClientStateB& state) {
    write_private_file(path, encode_b(state));
}

scheme_a::ClientStateA load_a(const std::filesystem::path& path) { return decode_a(read_file(path)); }
scheme_b::ClientStateB load_b(const std::filesystem::path& path) { return decode_b(read_file(path)); }

void write_private_file(const std::filesystem::path& path, ByteView data) { fileio::atomic_write(path, data); }

Bytes read_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::kIo, "no keystore at " + path.string());
    return fileio::read_file(path);
}

}  // namespace rdsse::keystore
