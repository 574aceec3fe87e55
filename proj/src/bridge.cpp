#include "imvol/bridge.hpp"

#include <stdexcept>

namespace imvol {

BridgeSession::BridgeSession(const SystemConfig& cfg, std::uint64_t env_seed,
                             TransportMode mode, std::uint16_t tcp_port)
    : ran_(cfg, env_seed) {
    auto [xapp_end, ran_end] = make_channel_pair(mode, tcp_port, &port_);
    xapp_end_ = std::move(xapp_end);
    ran_end_ = std::move(ran_end);
}

E2Message BridgeSession::read_from(FrameReader& reader, DuplexChannel& channel) {
    while (true) {
        if (auto msg = reader.next()) return std::move(*msg);
        std::uint8_t buf[4096];
        const std::size_t n = channel.receive(buf, sizeof buf);
        if (n == 0) {
            throw std::runtime_error("BridgeSession: channel closed mid-exchange");
        }
        reader.feed(std::span<const std::uint8_t>(buf, n));
    }
}

const std::vector<UserState>& BridgeSession::reset() {
    slot_ = 0;
    const auto& states = ran_.reset();

    xapp_end_->send(encode(xapp_.subscription_request(1)));
    const E2Message request = read_from(ran_reader_, *ran_end_);
    ran_end_->send(encode(ran_.handle(request)));
    const E2Message response = read_from(xapp_reader_, *xapp_end_);
    if (response.msg_type != MsgType::SubscriptionResponse ||
        response.correlation_id != request.correlation_id) {
        throw ProtocolError("BridgeSession: subscription handshake failed");
    }
    subscribed_ = true;
    return states;
}

SlotResult BridgeSession::run_slot(const RawActionProvider& provider) {
    if (!subscribed_) {
        throw std::logic_error("BridgeSession: run_slot before reset()");
    }

    // RAN side: the periodic report is due every slot (period 1)
    auto report = ran_.poll_report(slot_);
    if (!report) {
        throw std::logic_error("BridgeSession: no report due on the period-1 subscription");
    }
    ran_end_->send(encode(*report));

    // xApp side: decide on the reported states, push the allocation
    const E2Message indication = read_from(xapp_reader_, *xapp_end_);
    if (indication.msg_type != MsgType::ReportIndication) {
        throw ProtocolError("BridgeSession: expected a ReportIndication");
    }
    SlotResult result;
    result.reported = std::get<ReportPayload>(indication.payload).users;
    if (result.reported.size() != static_cast<std::size_t>(env().config().num_users)) {
        throw ProtocolError("BridgeSession: reported user count does not match config");
    }
    result.raw = provider(result.reported);
    result.action = normalize_action(result.raw, env().config());
    xapp_end_->send(encode(xapp_.control_request(result.action)));

    // RAN side: validate and apply (an ack advances the environment)
    const E2Message request = read_from(ran_reader_, *ran_end_);
    ran_end_->send(encode(ran_.handle(request)));

    // xApp side: consume the verdict
    const E2Message verdict = read_from(xapp_reader_, *xapp_end_);
    if (verdict.correlation_id != request.correlation_id) {
        throw ProtocolError("BridgeSession: verdict does not echo the request id");
    }
    if (verdict.msg_type == MsgType::ControlAck) {
        result.acked = true;
        result.outcome = *ran_.last_outcome();
    } else if (verdict.msg_type == MsgType::ControlFailure) {
        result.acked = false;
        result.failure_reason = std::get<FailurePayload>(verdict.payload).reason;
    } else {
        throw ProtocolError("BridgeSession: expected ControlAck or ControlFailure");
    }
    ++slot_;
    return result;
}

}  // namespace imvol
