// Encrypted-index daemon. Holds only public parameters and the token map.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"
#include "rdsse/error.hpp"
#include "rdsse/net.hpp"
#include "rdsse/store.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rdsse encrypted-index server"};
    std::string scheme_text, store_text, listen_text = "127.0.0.1:7700";
    std::size_t snapshot_every = 1000;
    bool no_sync = false;
    app.add_option("--scheme", scheme_text, "a or b")->required()->check(CLI::IsMember({"a", "b", "A", "B"}));
    app.add_option("--store", store_text, "store file (relative paths resolve under $RDSSE_STORE_DIR)")
        ->required();
    app.add_option("--listen", listen_text, "HOST:PORT (port 0 picks a free port)");
    app.add_option("--snapshot-every", snapshot_every, "compact after N log records (0 = never)");
    app.add_flag("--no-sync", no_sync, "skip fdatasync before acknowledging (tests only)");
    CLI11_PARSE(app, argc, argv);

    std::filesystem::path store_path(store_text);
    if (const char* dir = std::getenv("RDSSE_STORE_DIR"); dir && *dir && store_path.is_relative()) {
        store_path = std::filesystem::path(dir) / store_path;
    }

    // Signals go to a dedicated thread so shutdown can take locks.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::signal(SIGPIPE, SIG_IGN);

    try {
        auto scheme = rdsse::parse_scheme(scheme_text);
        auto store = rdsse::IndexStore::open(store_path, scheme, {snapshot_every, !no_sync});
        rdsse::net::Server server(*store);
        rdsse::net::TcpServer tcp(server, rdsse::net::parse_host_port(listen_text));
        std::cout << "rdsse_server scheme=" << rdsse::scheme_name(scheme) << " store=" << store_path.string()
                  << " entries=" << store->index().size() << (store->recovered_dropped_tail() ? " (dropped torn tail)" : "")
                  << " listening on port " << tcp.port() << std::endl;

        std::thread waiter([&] {
            int sig = 0;
            sigwait(&signals, &sig);
            tcp.stop();
        });
        waiter.detach();
        tcp.run();
        store->compact();
        std::cout << "rdsse_server stopped, entries=" << store->index().size() << std::endl;
    } catch (const rdsse::Error& e) {
        std::cerr << "error [" << rdsse::error_code_name(e.code()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
