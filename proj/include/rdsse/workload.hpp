#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rdsse/bytes.hpp"
#include "rdsse/config.hpp"
#include "rdsse/transcript.hpp"

namespace rdsse::workload {

/// Plaintext mirror of every add/del the client issued: value -> documents.
class ShadowDb {
public:
    void add(std::uint64_t v, const DocId& id) { db_[v].insert(id); }
    void del(std::uint64_t v, const DocId& id);
    std::set<DocId> range(std::uint64_t a, std::uint64_t b) const;
    bool contains(std::uint64_t v, const DocId& id) const;
    /// Value at which a document is live, if any.
    std::optional<std::uint64_t> value_of(const DocId& id) const;
    std::size_t live_pairs() const;
    const std::map<std::uint64_t, std::set<DocId>>& data() const { return db_; }

    Bytes serialize() const;
    static ShadowDb deserialize(ByteView data);

private:
    std::map<std::uint64_t, std::set<DocId>> db_;
};

struct WorkloadSpec {
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::kA;
    std::uint64_t values = 64;   // final domain size
    std::size_t ops = 500;       // updates
    std::size_t queries = 100;   // range searches, interleaved with updates
    double delete_fraction = 0;  // scheme B only
    std::size_t max_docs = 1000; // distinct document ids over the run
    std::size_t max_live = 0;    // scheme B live cap; 0 = no cap
};

struct WorkloadOp {
    enum class Kind { kAdd, kDel, kSearch };
    Kind kind = Kind::kAdd;
    std::uint64_t v = 0;  // update value, or range start
    std::uint64_t b = 0;  // range end
    DocId id{};
};

/// Deterministic in the seed. The value bound grows linearly over the run, so
/// a run to `values` values crosses every capacity doubling on the way.
/// Deletes target live documents; deleted ids are sometimes re-added
/// elsewhere.
std::vector<WorkloadOp> generate(const WorkloadSpec& spec);

struct VerifyReport {
    std::size_t updates = 0;
    std::size_t deletes = 0;
    std::size_t searches = 0;
    std::size_t mismatches = 0;
    std::vector<std::size_t> cover_sizes;
    std::size_t max_update_fanout = 0;
    std::size_t doublings = 0;
    std::size_t copies = 0;
    std::size_t max_client_entries = 0;      // scheme A chain table
    std::size_t final_capacity = 0;
    std::size_t table1_violations = 0;
    std::vector<std::string> notes;          // first few violation details
    std::size_t crypto_state_bytes_min = 0;  // scheme B keys only
    std::size_t crypto_state_bytes_max = 0;
    std::size_t max_ciphertexts_per_node = 0;
    std::uint64_t anomalies = 0;
    double seconds = 0;

    bool empty() const { return updates == 0 && searches == 0; }
    bool ok() const { return mismatches == 0 && table1_violations == 0 && anomalies == 0; }
    std::string render() const;
};

/// Runs the generated workload through client, wire encoding and an
/// in-process server, checking every result against a ShadowDb and every
/// message count against Table 1.
VerifyReport verify_workload(const WorkloadSpec& spec, const SecurityConfig& config,
                             audit::Transcript* transcript = nullptr);

/// Table 1 message count for one update in a tree of capacity C.
std::size_t expected_update_messages(std::uint64_t capacity);

}  // namespace rdsse::workload
