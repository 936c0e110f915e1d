#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "rdsse/net.hpp"
#include "rdsse/scheme_a.hpp"
#include "rdsse/scheme_b.hpp"
#include "rdsse/transcript.hpp"

namespace rdsse::client {

struct UpdateOutcome {
    std::size_t messages = 0;  // UPDATE_* frames
    std::size_t copies = 0;    // COPY_B frames
    std::vector<Doubling> doublings;
    std::uint32_t slot = 0;  // scheme B
};

struct SearchOutcome {
    std::set<DocId> ids;
    std::size_t cover_size = 0;   // |minimal_cover| of the clamped range
    std::size_t tokens = 0;       // SEARCH_* frames sent
    std::size_t ciphertexts = 0;  // scheme B replies carrying a ciphertext
    std::uint64_t anomalies = 0;
};

/// Drives scheme A over a channel. Every frame is mirrored into the
/// transcript (when given) together with its client-side ground truth.
class SessionA {
public:
    SessionA(scheme_a::ClientStateA& state, net::Channel& channel, audit::Transcript* transcript = nullptr)
        : state_(state), channel_(channel), transcript_(transcript) {}

    /// Installs the public parameters; throws kSchemeMismatch if the server
    /// holds different ones.
    void hello();
    /// Values beyond the domain grow it first.
    UpdateOutcome add(std::uint64_t v, const DocId& id);
    SearchOutcome search(std::uint64_t a, std::uint64_t b);

private:
    scheme_a::ClientStateA& state_;
    net::Channel& channel_;
    audit::Transcript* transcript_;
};

class SessionB {
public:
    SessionB(scheme_b::ClientStateB& state, net::Channel& channel, audit::Transcript* transcript = nullptr)
        : state_(state), channel_(channel), transcript_(transcript) {}

    void hello();
    UpdateOutcome add(std::uint64_t v, const DocId& id);
    UpdateOutcome del(std::uint64_t v, const DocId& id);
    SearchOutcome search(std::uint64_t a, std::uint64_t b);

private:
    UpdateOutcome update(scheme_b::UpdateOp op, std::uint64_t v, const DocId& id);

    scheme_b::ClientStateB& state_;
    net::Channel& channel_;
    audit::Transcript* transcript_;
};

wire::Stats query_stats(net::Channel& channel);

}  // namespace rdsse::client
