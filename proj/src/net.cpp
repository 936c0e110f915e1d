#include "rdsse/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace rdsse::net {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

/// Reads exactly n bytes; returns false on EOF before any byte was read.
bool read_exact(int fd, std::uint8_t* out, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        ssize_t r = ::recv(fd, out + got, n - got, 0);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw_errno("recv");
        }
        if (r == 0) {
            if (got == 0) return false;
            throw Error(ErrorCode::kProtocol, "connection closed mid-frame");
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

void send_all(int fd, ByteView data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("send");
        }
        off += static_cast<std::size_t>(n);
    }
}

addrinfo* resolve(const HostPort& hp, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    std::string port = std::to_string(hp.port);
    int rc = ::getaddrinfo(hp.host.c_str(), port.c_str(), &hints, &res);
    if (rc != 0) {
        throw Error(ErrorCode::kIo, "cannot resolve " + hp.host + ": " + ::gai_strerror(rc));
    }
    return res;
}

}  // namespace

HostPort parse_host_port(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument, "expected HOST:PORT, got '" + text + "'");
    }
    HostPort hp;
    hp.host = text.substr(0, colon);
    if (hp.host.empty()) hp.host = "127.0.0.1";
    try {
        int port = std::stoi(text.substr(colon + 1));
        if (port < 0 || port > 65535) throw std::out_of_range("port");
        hp.port = static_cast<std::uint16_t>(port);
    } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "bad port in '" + text + "'");
    }
    return hp;
}

std::optional<wire::Frame> read_frame(int fd) {
    std::uint8_t header[wire::kHeaderSize];
    if (!read_exact(fd, header, sizeof header)) return std::nullopt;
    ByteReader in({header, sizeof header});
    wire::Frame f;
    f.type = in.u8();
    std::uint32_t len = in.u32();
    if (len > wire::kMaxPayload) throw Error(ErrorCode::kProtocol, "frame payload too large");
    f.payload.resize(len);
    if (len > 0 && !read_exact(fd, reinterpret_cast<std::uint8_t*>(f.payload.data()), len)) {
        throw Error(ErrorCode::kProtocol, "connection closed mid-frame");
    }
    return f;
}

void write_frame(int fd, const wire::Frame& frame) { send_all(fd, wire::encode_frame(frame)); }

// -- Server ------------------------------------------------------------------

Server::Server(IndexStore& store) : index_(store.index()), store_(&store) {}

Server::Server(EncryptedIndex& index) : index_(index) {}

wire::Frame Server::handle(const wire::Frame& request) {
    try {
        return dispatch(request);
    } catch (const Error& e) {
        return wire::make_error({e.code(), e.what()});
    } catch (const std::exception& e) {
        return wire::make_error({ErrorCode::kProtocol, e.what()});
    }
}

PublicParams Server::require_params() const {
    auto p = index_.params();
    if (!p) throw Error(ErrorCode::kPrecondition, "store has no public parameters yet; send HELLO first");
    return *p;
}

void Server::require_scheme(Scheme s, std::uint8_t type) const {
    if (index_.scheme() != s) {
        throw Error(ErrorCode::kSchemeMismatch, std::string(wire::type_name(type)) + " sent to a scheme " +
                                                    std::string(scheme_name(index_.scheme())) + " store");
    }
}

void Server::after_mutation() {
    if (store_ != nullptr) store_->maybe_compact();
}

wire::Frame Server::hello(const wire::Frame& request) {
    auto h = wire::parse_hello(request);
    if (h.scheme != index_.scheme()) {
        throw Error(ErrorCode::kSchemeMismatch, "client speaks scheme " + std::string(scheme_name(h.scheme)) +
                                                    ", store holds scheme " +
                                                    std::string(scheme_name(index_.scheme())));
    }
    if (h.params) {
        std::lock_guard lock(write_mutex_);
        index_.set_params(*h.params);
        after_mutation();
    }
    return wire::make_hello({index_.scheme(), index_.params()});
}

wire::Frame Server::dispatch(const wire::Frame& request) {
    using wire::MsgType;
    switch (request.msg_type()) {
        case MsgType::kHello:
            return hello(request);
        case MsgType::kUpdateA: {
            require_scheme(Scheme::kA, request.type);
            auto msg = wire::parse_update_a(request);
            std::lock_guard lock(write_mutex_);
            require_params();
            scheme_a::server_update_a(index_, msg);
            after_mutation();
            return wire::make_ack(MsgType::kUpdateA);
        }
        case MsgType::kSearchA: {
            require_scheme(Scheme::kA, request.type);
            auto req = wire::parse_search_a(request);
            auto params = require_params();
            auto result = scheme_a::server_search_a(index_, params.tdp, req);
            index_.add_anomalies(result.anomalies);
            return wire::make_results_a(result);
        }
        case MsgType::kUpdateB: {
            require_scheme(Scheme::kB, request.type);
            auto msg = wire::parse_update_b(request);
            auto params = require_params();
            std::lock_guard lock(write_mutex_);
            scheme_b::server_update_b(index_, params.paillier, msg);
            after_mutation();
            return wire::make_ack(MsgType::kUpdateB);
        }
        case MsgType::kCopyB: {
            require_scheme(Scheme::kB, request.type);
            auto msg = wire::parse_copy_b(request);
            std::lock_guard lock(write_mutex_);
            require_params();
            scheme_b::server_copy_b(index_, msg);
            after_mutation();
            return wire::make_ack(MsgType::kCopyB);
        }
        case MsgType::kSearchB: {
            require_scheme(Scheme::kB, request.type);
            auto ut = wire::parse_search_b(request);
            return wire::make_results_b(scheme_b::server_search_b(index_, ut));
        }
        case MsgType::kStats:
            return wire::make_stats({index_.scheme(), index_.size(), index_.anomalies()});
        case MsgType::kResultsA:
        case MsgType::kResultsB:
        case MsgType::kError:
            break;
    }
    throw Error(ErrorCode::kProtocol,
                "unexpected message type 0x" + to_hex(ByteView(&request.type, 1)));
}

// -- TcpServer ---------------------------------------------------------------

TcpServer::TcpServer(Server& server, const HostPort& listen) : server_(server) {
    addrinfo* res = resolve(listen, true);
    int last_errno = 0;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_errno = errno;
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (listen_fd_ < 0) {
        errno = last_errno;
        throw_errno("bind " + listen.host + ":" + std::to_string(listen.port));
    }
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    if (addr.ss_family == AF_INET) {
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    } else {
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
}

TcpServer::~TcpServer() {
    stop();
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::run() {
    while (!stopping_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 200);
        if (rc <= 0) continue;
        int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(conn_mutex_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        conn_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void TcpServer::stop() {
    stopping_ = true;
    std::lock_guard lock(conn_mutex_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
}

void TcpServer::serve_connection(int fd) {
    try {
        while (!stopping_) {
            auto request = read_frame(fd);
            if (!request) break;
            write_frame(fd, server_.handle(*request));
        }
    } catch (const std::exception&) {
        // Broken connection; the client sees EOF.
    }
    std::lock_guard lock(conn_mutex_);
    conn_fds_.remove(fd);
    ::close(fd);
}

// -- Channels ----------------------------------------------------------------

wire::Frame LoopbackChannel::roundtrip(const wire::Frame& request) {
    Bytes bytes = wire::encode_frame(request);
    std::size_t used = 0;
    auto decoded = wire::decode_frame(bytes, used);
    auto reply = server_.handle(*decoded);
    Bytes reply_bytes = wire::encode_frame(reply);
    return *wire::decode_frame(reply_bytes, used);
}

TcpChannel::TcpChannel(const HostPort& address) {
    addrinfo* res = resolve(address, false);
    int last_errno = 0;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        last_errno = errno;
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) {
        errno = last_errno;
        throw_errno("connect " + address.host + ":" + std::to_string(address.port));
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() {
    if (fd_ >= 0) ::close(fd_);
}

wire::Frame TcpChannel::roundtrip(const wire::Frame& request) {
    write_frame(fd_, request);
    auto reply = read_frame(fd_);
    if (!reply) throw Error(ErrorCode::kIo, "server closed the connection");
    return *reply;
}

}  // namespace rdsse::net
