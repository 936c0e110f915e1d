#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "rdsse/encrypted_index.hpp"
#include "rdsse/store.hpp"
#include "rdsse/wire.hpp"

namespace rdsse::net {

struct HostPort {
    std::string host;
    std::uint16_t port = 0;
};

/// "HOST:PORT"; an empty host means 127.0.0.1.
HostPort parse_host_port(const std::string& text);

/// Blocking frame I/O on a connected socket. read_frame returns nullopt on a
/// clean EOF before the first header byte.
std::optional<wire::Frame> read_frame(int fd);
void write_frame(int fd, const wire::Frame& frame);

/// Server half of both schemes. Mutations are serialized and reach the store
/// log before the acknowledgement is produced; searches run concurrently.
class Server {
public:
    explicit Server(IndexStore& store);
    /// Volatile server over a bare index (tests, in-process verification).
    explicit Server(EncryptedIndex& index);

    wire::Frame handle(const wire::Frame& request);

    EncryptedIndex& index() { return index_; }

private:
    wire::Frame dispatch(const wire::Frame& request);
    wire::Frame hello(const wire::Frame& request);
    PublicParams require_params() const;
    void require_scheme(Scheme s, std::uint8_t type) const;
    void after_mutation();

    EncryptedIndex& index_;
    IndexStore* store_ = nullptr;
    std::mutex write_mutex_;
};

/// Accept loop: one thread per connection.
class TcpServer {
public:
    TcpServer(Server& server, const HostPort& listen);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    /// Actual bound port (useful with port 0).
    std::uint16_t port() const { return port_; }
    /// Runs until stop() is called.
    void run();
    void stop();

private:
    void serve_connection(int fd);

    Server& server_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex conn_mutex_;
    std::list<int> conn_fds_;
    std::list<std::thread> workers_;
};

/// Client transport: one request frame in, one reply frame out.
class Channel {
public:
    virtual ~Channel() = default;
    virtual wire::Frame roundtrip(const wire::Frame& request) = 0;
};

/// Hands frames straight to an in-process Server, still passing through the
/// byte encoding so wire sizes match a real connection.
class LoopbackChannel final : public Channel {
public:
    explicit LoopbackChannel(Server& server) : server_(server) {}
    wire::Frame roundtrip(const wire::Frame& request) override;

private:
    Server& server_;
};

class TcpChannel final : public Channel {
public:
    explicit TcpChannel(const HostPort& address);
    ~TcpChannel() override;
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

    wire::Frame roundtrip(const wire::Frame& request) override;

private:
    int fd_ = -1;
};

}  // namespace rdsse::net
