#include "imvol/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <deque>
#include <stdexcept>

namespace imvol {

namespace {

using ByteQueue = std::deque<std::uint8_t>;

class InprocChannel final : public DuplexChannel {
public:
    InprocChannel(std::shared_ptr<ByteQueue> in, std::shared_ptr<ByteQueue> out)
        : in_(std::move(in)), out_(std::move(out)) {}

    void send(std::span<const std::uint8_t> bytes) override {
        out_->insert(out_->end(), bytes.begin(), bytes.end());
    }

    std::size_t receive(std::uint8_t* out, std::size_t max) override {
        const std::size_t n = std::min(max, in_->size());
        std::copy_n(in_->begin(), static_cast<std::ptrdiff_t>(n), out);
        in_->erase(in_->begin(), in_->begin() + static_cast<std::ptrdiff_t>(n));
        return n;
    }

private:
    std::shared_ptr<ByteQueue> in_;
    std::shared_ptr<ByteQueue> out_;
};

[[noreturn]] void throw_errno(const char* what) {
    throw std::runtime_error(std::string(what) + ": " + std::strerror(errno));
}

class FdChannel final : public DuplexChannel {
public:
    explicit FdChannel(int fd) : fd_(fd) {}
    FdChannel(const FdChannel&) = delete;
    FdChannel& operator=(const FdChannel&) = delete;
    ~FdChannel() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void send(std::span<const std::uint8_t> bytes) override {
        const std::uint8_t* p = bytes.data();
        std::size_t left = bytes.size();
        while (left > 0) {
            const ssize_t n = ::send(fd_, p, left, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw_errno("tcp send");
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
    }

    std::size_t receive(std::uint8_t* out, std::size_t max) override {
        while (true) {
            const ssize_t n = ::recv(fd_, out, max, 0);
            if (n >= 0) return static_cast<std::size_t>(n);
            if (errno == EINTR) continue;
            throw_errno("tcp recv");
        }
    }

private:
    int fd_ = -1;
};

}  // namespace

std::string to_string(TransportMode mode) {
    switch (mode) {
        case TransportMode::Inproc: return "inproc";
        case TransportMode::TcpLoopback: return "tcp-loopback";
    }
    throw std::invalid_argument("to_string: unknown TransportMode");
}

TransportMode transport_mode_from_string(const std::string& name) {
    if (name == "inproc") return TransportMode::Inproc;
    if (name == "tcp-loopback") return TransportMode::TcpLoopback;
    throw std::invalid_argument("unknown transport \"" + name +
                                "\" (expected inproc or tcp-loopback)");
}

ChannelPair make_inproc_pair() {
    auto a_to_b = std::make_shared<ByteQueue>();
    auto b_to_a = std::make_shared<ByteQueue>();
    return {std::make_unique<InprocChannel>(b_to_a, a_to_b),
            std::make_unique<InprocChannel>(a_to_b, b_to_a)};
}

ChannelPair make_tcp_loopback_pair(std::uint16_t port, std::uint16_t* bound_port) {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw_errno("tcp socket");
    int client = -1;
    try {
        const int one = 1;
        ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        if (::bind(listener, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
            throw_errno("tcp bind");
        }
        if (::listen(listener, 1) < 0) throw_errno("tcp listen");
        socklen_t len = sizeof addr;
        if (::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
            throw_errno("tcp getsockname");
        }
        if (bound_port) *bound_port = ntohs(addr.sin_port);

        client = ::socket(AF_INET, SOCK_STREAM, 0);
        if (client < 0) throw_errno("tcp socket");
        // a loopback connect against a listening socket completes through the
        // backlog, so the single-threaded connect-then-accept order is safe
        if (::connect(client, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
            throw_errno("tcp connect");
        }
        const int server = ::accept(listener, nullptr, nullptr);
        if (server < 0) throw_errno("tcp accept");
        ::close(listener);

        // request/response turnaround per slot: leaving Nagle on would
        // serialize every exchange behind delayed ACKs
        ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        ::setsockopt(server, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return {std::make_unique<FdChannel>(client), std::make_unique<FdChannel>(server)};
    } catch (...) {
        if (client >= 0) ::close(client);
        ::close(listener);
        throw;
    }
}

ChannelPair make_channel_pair(TransportMode mode, std::uint16_t port,
                              std::uint16_t* bound_port) {
    switch (mode) {
        case TransportMode::Inproc:
            if (bound_port) *bound_port = 0;
            return make_inproc_pair();
        case TransportMode::TcpLoopback:
            return make_tcp_loopback_pair(port, bound_port);
    }
    throw std::invalid_argument("make_channel_pair: unknown TransportMode");
}

}  // namespace imvol
