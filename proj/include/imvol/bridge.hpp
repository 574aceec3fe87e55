#pragma once

#include <functional>
#include <memory>

#include "imvol/e2.hpp"
#include "imvol/transport.hpp"

namespace imvol {

/// Everything one protocol round produces, as seen by the training loop.
struct SlotResult {
    std::vector<UserState> reported;  // user states the indication carried
    std::vector<double> raw;          // provider output before normalization
    AllocationAction action;          // normalized allocation that was sent
    bool acked = false;
    std::string failure_reason;       // set when !acked (environment untouched)
    StepOutcome outcome;              // valid only when acked
};

// Runs the xApp and RAN endpoints in lockstep on one thread, exchanging
// framed messages over the selected byte channel. Every action reaches the
// environment only through the wire: report -> decision -> control -> ack.
class BridgeSession {
public:
    /// Maps reported user states to a raw action vector in [0,1]^(5U).
    using RawActionProvider = std::function<std::vector<double>(std::span<const UserState>)>;

    BridgeSession(const SystemConfig& cfg, std::uint64_t env_seed, TransportMode mode,
                  std::uint16_t tcp_port = 0);

    /// New episode: resets the environment and (re)subscribes over the wire
    /// at report period 1. Returns the fresh user states.
    const std::vector<UserState>& reset();

    /// One slot: the RAN reports, the provider decides, the normalized action
    /// travels back as a ControlRequest, and an ack advances the environment.
    SlotResult run_slot(const RawActionProvider& provider);

    const Environment& env() const { return ran_.env(); }
    /// Actually bound port in tcp-loopback mode, 0 for inproc.
    std::uint16_t tcp_port() const { return port_; }

private:
    E2Message read_from(FrameReader& reader, DuplexChannel& channel);

    RanEndpoint ran_;
    XappEndpoint xapp_;
    std::unique_ptr<DuplexChannel> xapp_end_;
    std::unique_ptr<DuplexChannel> ran_end_;
    FrameReader xapp_reader_;  // frames arriving at the xApp
    FrameReader ran_reader_;   // frames arriving at the RAN endpoint
    std::uint64_t slot_ = 0;
    std::uint16_t port_ = 0;
    bool subscribed_ = false;
};

}  // namespace imvol
