// Stateful client: holds every secret, mirrors its own updates in a plaintext
// shadow file, and records a transcript for the leakage auditor.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdsse/audit.hpp"
#include "rdsse/error.hpp"
#include "rdsse/fileio.hpp"
#include "rdsse/keystore.hpp"
#include "rdsse/session.hpp"
#include "rdsse/workload.hpp"

namespace fs = std::filesystem;
using namespace rdsse;

namespace {

constexpr int kExitError = 1;
constexpr int kExitAuditFail = 2;
constexpr int kExitMismatch = 3;

struct Paths {
    fs::path keystore;
    fs::path shadow() const { return fs::path(keystore.string() + ".shadow"); }
    fs::path transcript() const { return fs::path(keystore.string() + ".transcript"); }
};

workload::ShadowDb load_shadow(const Paths& p) {
    if (!fs::exists(p.shadow())) return {};
    return workload::ShadowDb::deserialize(fileio::read_file(p.shadow()));
}

void save_shadow(const Paths& p, const workload::ShadowDb& db) { fileio::atomic_write(p.shadow(), db.serialize()); }

audit::Transcript load_transcript(const Paths& p) {
    if (!fs::exists(p.transcript())) return {};
    return audit::Transcript::load(p.transcript());
}

SecurityConfig profile_config(const std::string& profile, unsigned mask_width) {
    SecurityConfig cfg = profile == "test" ? SecurityConfig::test_profile() : SecurityConfig{};
    if (mask_width != 0) cfg.mask_width = mask_width;
    return cfg;
}

std::string join_ids(const std::set<DocId>& ids) {
    std::vector<std::string> names;
    for (const auto& id : ids) names.push_back(doc_id_name(id));
    std::sort(names.begin(), names.end());
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : " ") + n;
    return out;
}

void write_summary(const std::string& path, const nlohmann::json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::kIo, "cannot write summary " + path);
    out << j.dump(2) << '\n';
}

nlohmann::json report_json(const workload::VerifyReport& r) {
    std::size_t max_cover = 0;
    for (auto c : r.cover_sizes) max_cover = std::max(max_cover, c);
    return {{"updates", r.updates},
            {"deletes", r.deletes},
            {"searches", r.searches},
            {"mismatches", r.mismatches},
            {"max_cover_size", max_cover},
            {"max_update_fanout", r.max_update_fanout},
            {"final_capacity", r.final_capacity},
            {"doublings", r.doublings},
            {"max_client_entries", r.max_client_entries},
            {"table1_violations", r.table1_violations},
            {"anomalies", r.anomalies},
            {"seconds", r.seconds}};
}

/// Loads whichever scheme the keystore holds, runs `fn` with a connected
/// session, then persists state, shadow and transcript.
template <typename FnA, typename FnB>
int with_session(const Paths& paths, const std::string& server, FnA&& fn_a, FnB&& fn_b) {
    auto scheme = keystore::probe(paths.keystore);
    auto shadow = load_shadow(paths);
    auto transcript = load_transcript(paths);
    net::TcpChannel channel(net::parse_host_port(server));
    int rc = 0;
    if (scheme == Scheme::kA) {
        auto state = keystore::load_a(paths.keystore);
        client::SessionA session(state, channel, &transcript);
        rc = fn_a(session, state, shadow);
        keystore::save(paths.keystore, state);
    } else {
        auto state = keystore::load_b(paths.keystore);
        client::SessionB session(state, channel, &transcript);
        rc = fn_b(session, state, shadow);
        keystore::save(paths.keystore, state);
    }
    save_shadow(paths, shadow);
    transcript.save(paths.transcript());
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rdsse range-query DSSE client"};
    app.require_subcommand(1);
    const char* env_server = std::getenv("RDSSE_SERVER");
    std::string server = env_server && *env_server ? env_server : "127.0.0.1:7700";
    std::string keystore_path = "rdsse.keystore";
    app.add_option("--server", server, "HOST:PORT of the index server (env RDSSE_SERVER)");
    app.add_option("--keystore", keystore_path, "client keystore; .shadow and .transcript sit beside it");

    std::string scheme_text = "a", profile = "default", summary;
    unsigned mask_width = 0;
    bool offline = false;
    auto* setup = app.add_subcommand("setup", "generate keys and register public parameters");
    setup->add_option("--scheme", scheme_text, "a (forward private) or b (backward private)")
        ->check(CLI::IsMember({"a", "b", "A", "B"}));
    setup->add_option("--profile", profile, "key sizes: default (2048-bit) or test (512-bit)")
        ->check(CLI::IsMember({"default", "test"}));
    setup->add_option("--mask-width", mask_width, "scheme B bit-string width y");
    setup->add_flag("--offline", offline, "do not contact the server");

    std::uint64_t value = 0, range_a = 0, range_b = 0;
    std::string doc;
    auto* add = app.add_subcommand("add", "add a document under a value");
    add->add_option("value", value)->required();
    add->add_option("id", doc, "document name, up to 16 bytes")->required();
    auto* del = app.add_subcommand("del", "delete a document from a value (scheme B only)");
    del->add_option("value", value)->required();
    del->add_option("id", doc)->required();

    bool verify_search = false;
    auto* search = app.add_subcommand("search", "range query [A, B]");
    search->add_option("a", range_a)->required();
    search->add_option("b", range_b)->required();
    search->add_flag("--verify", verify_search, "diff against the shadow database");

    auto* stats = app.add_subcommand("stats", "server entry count");

    workload::WorkloadSpec spec;
    std::size_t seeds = 1;
    auto add_workload_opts = [&](CLI::App* sub) {
        sub->add_option("--scheme", scheme_text)->check(CLI::IsMember({"a", "b", "A", "B"}));
        sub->add_option("--values", spec.values, "final domain size m");
        sub->add_option("--ops", spec.ops, "updates");
        sub->add_option("--queries", spec.queries, "range searches");
        sub->add_option("--seed", spec.seed);
        sub->add_option("--delete-fraction", spec.delete_fraction, "scheme B delete probability");
        sub->add_option("--max-docs", spec.max_docs, "distinct document ids");
        sub->add_option("--profile", profile)->check(CLI::IsMember({"default", "test"}));
        sub->add_option("--summary", summary, "write a JSON summary here");
    };
    auto* bench = app.add_subcommand("bench", "run a generated workload in process and report timings");
    add_workload_opts(bench);
    auto* verify = app.add_subcommand("verify", "check seeded workloads against the plaintext oracle");
    add_workload_opts(verify);
    verify->add_option("--seeds", seeds, "number of consecutive seeds");

    auto* audit_cmd = app.add_subcommand("audit", "leakage audit of the recorded transcript");
    audit_cmd->add_option("--summary", summary, "write a JSON summary here");

    CLI11_PARSE(app, argc, argv);
    Paths paths{keystore_path};

    try {
        if (*setup) {
            auto scheme = parse_scheme(scheme_text);
            auto cfg = profile_config(profile, mask_width);
            if (fs::exists(paths.keystore)) {
                throw Error(ErrorCode::kPrecondition, "keystore " + paths.keystore.string() + " already exists");
            }
            PublicParams params;
            if (scheme == Scheme::kA) {
                auto state = scheme_a::setup_a(cfg).first;
                params = state.public_params();
                keystore::save(paths.keystore, state);
            } else {
                auto state = scheme_b::setup_b(cfg).first;
                params = state.public_params();
                keystore::save(paths.keystore, state);
            }
            save_shadow(paths, {});
            audit::Transcript{}.save(paths.transcript());
            std::cout << "keystore " << paths.keystore.string() << " scheme " << scheme_name(scheme) << '\n';
            if (!offline) {
                net::TcpChannel channel(net::parse_host_port(server));
                auto reply = channel.roundtrip(wire::make_hello({scheme, params}));
                wire::expect_type(reply, wire::MsgType::kHello);
                auto hello = wire::parse_hello(reply);
                if (!hello.params || !(*hello.params == params)) {
                    throw Error(ErrorCode::kSchemeMismatch, "server already holds a different index");
                }
                std::cout << "server " << server << " registered\n";
            }
            return 0;
        }
        if (*add || *del) {
            bool is_del = del->parsed();
            DocId id = doc_id_from_name(doc);
            return with_session(
                paths, server,
                [&](client::SessionA& s, scheme_a::ClientStateA& state, workload::ShadowDb& shadow) {
                    if (is_del) throw Error(ErrorCode::kUnsupported, "del is unsupported by construction A");
                    s.hello();
                    auto out = s.add(value, id);
                    shadow.add(value, id);
                    std::cout << "added " << doc << " at " << value << ": " << out.messages << " messages, m="
                              << state.geometry().m() << '\n';
                    return 0;
                },
                [&](client::SessionB& s, scheme_b::ClientStateB& state, workload::ShadowDb& shadow) {
                    if (is_del && !shadow.contains(value, id)) {
                        throw Error(ErrorCode::kPrecondition,
                                    "balanced-ops precondition: " + doc + " is not live at " + std::to_string(value));
                    }
                    if (!is_del) {
                        if (auto at = shadow.value_of(id)) {
                            throw Error(ErrorCode::kPrecondition, "balanced-ops precondition: " + doc +
                                                                      " is already live at " + std::to_string(*at));
                        }
                    }
                    s.hello();
                    auto out = is_del ? s.del(value, id) : s.add(value, id);
                    if (is_del) {
                        shadow.del(value, id);
                    } else {
                        shadow.add(value, id);
                    }
                    std::cout << (is_del ? "deleted " : "added ") << doc << " at " << value << ": "
                              << out.messages << " messages, " << out.copies << " copies, m=" << state.geometry().m()
                              << '\n';
                    return 0;
                });
        }
        if (*search) {
            auto report = [&](const client::SearchOutcome& out, const workload::ShadowDb& shadow) {
                std::cout << join_ids(out.ids) << '\n';
                std::cerr << "cover " << out.cover_size << ", tokens " << out.tokens << '\n';
                if (!verify_search) return 0;
                auto expected = shadow.range(range_a, range_b);
                if (expected == out.ids) {
                    std::cerr << "verify: OK\n";
                    return 0;
                }
                std::cerr << "verify: MISMATCH expected {" << join_ids(expected) << "}\n";
                return kExitMismatch;
            };
            return with_session(
                paths, server,
                [&](client::SessionA& s, scheme_a::ClientStateA&, workload::ShadowDb& shadow) {
                    s.hello();
                    return report(s.search(range_a, range_b), shadow);
                },
                [&](client::SessionB& s, scheme_b::ClientStateB&, workload::ShadowDb& shadow) {
                    s.hello();
                    return report(s.search(range_a, range_b), shadow);
                });
        }
        if (*stats) {
            net::TcpChannel channel(net::parse_host_port(server));
            auto st = client::query_stats(channel);
            std::cout << "scheme    " << scheme_name(st.scheme) << "\nentries   " << st.entries << "\nanomalies "
                      << st.anomalies << '\n';
            return 0;
        }
        if (*bench || *verify) {
            spec.scheme = parse_scheme(scheme_text);
            auto cfg = profile_config(profile, 0);
            if (spec.scheme == Scheme::kB) spec.max_live = cfg.mask_width - 1;
            nlohmann::json runs = nlohmann::json::array();
            std::size_t mismatches = 0, violations = 0;
            for (std::size_t i = 0; i < seeds; ++i) {
                auto run = spec;
                run.seed = spec.seed + i;
                auto r = workload::verify_workload(run, cfg);
                mismatches += r.mismatches;
                violations += r.table1_violations;
                std::cout << "scheme " << scheme_name(run.scheme) << " seed " << run.seed << '\n' << r.render();
                if (*bench) {
                    double ops = static_cast<double>(r.updates + r.searches);
                    std::cout << std::fixed << std::setprecision(3) << "  wall seconds                " << r.seconds
                              << "\n  operations per second       " << (r.seconds > 0 ? ops / r.seconds : 0) << '\n';
                }
                auto j = report_json(r);
                j["seed"] = run.seed;
                runs.push_back(j);
            }
            std::cout << "verification mismatches: " << mismatches << '\n';
            write_summary(summary, {{"scheme", std::string(scheme_name(spec.scheme))}, {"runs", runs},
                                    {"mismatches", mismatches}, {"table1_violations", violations}});
            return mismatches == 0 && violations == 0 ? 0 : kExitMismatch;
        }
        if (*audit_cmd) {
            auto transcript = load_transcript(paths);
            audit::AuditReport report;
            if (keystore::probe(paths.keystore) == Scheme::kA) {
                auto state = keystore::load_a(paths.keystore);
                report = audit::audit_forward_a(transcript, state.tdp().pub);
            } else {
                auto state = keystore::load_b(paths.keystore);
                report = audit::audit_backward_b(transcript, state.paillier(), state.mask_width());
            }
            std::cout << report.render();
            nlohmann::json violations = nlohmann::json::array();
            for (const auto& v : report.violations) {
                violations.push_back({{"check", v.check}, {"seqs", v.seqs}, {"detail", v.detail}});
            }
            write_summary(summary, {{"audit", report.name}, {"pass", report.pass()},
                                    {"counters", report.counters}, {"violations", violations}});
            return report.pass() ? 0 : kExitAuditFail;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
