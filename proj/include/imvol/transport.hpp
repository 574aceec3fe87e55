#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace imvol {

enum class TransportMode { Inproc, TcpLoopback };

std::string to_string(TransportMode mode);
/// Accepts "inproc" and "tcp-loopback"; throws std::invalid_argument otherwise.
TransportMode transport_mode_from_string(const std::string& name);

// Blocking duplex byte stream between two endpoints. Implementations carry
// opaque bytes only — framing lives entirely in the codec, so the same
// message encoding works over any channel.
class DuplexChannel {
public:
    virtual ~DuplexChannel() = default;

    virtual void send(std::span<const std::uint8_t> bytes) = 0;

    /// Reads up to `max` bytes into `out`, returning the count. 0 means the
    /// peer closed (TCP) or no bytes are pending (in-process lockstep).
    virtual std::size_t receive(std::uint8_t* out, std::size_t max) = 0;
};

/// {first endpoint, second endpoint} wired back to back.
using ChannelPair = std::pair<std::unique_ptr<DuplexChannel>, std::unique_ptr<DuplexChannel>>;

/// Two deque-backed in-process channel ends.
ChannelPair make_inproc_pair();

/// A connected TCP stream over 127.0.0.1: {client end, server end}.
/// `port` 0 picks an ephemeral port; `bound_port`, when non-null, receives
/// the actually bound port. Nagle's algorithm is disabled on both ends.
ChannelPair make_tcp_loopback_pair(std::uint16_t port, std::uint16_t* bound_port = nullptr);

ChannelPair make_channel_pair(TransportMode mode, std::uint16_t port = 0,
                              std::uint16_t* bound_port = nullptr);

}  // namespace imvol
