#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "imvol/env.hpp"
#include "imvol/policies.hpp"

namespace imvol {

// Control-plane message kinds for the near-RT RIC loop: the xApp subscribes
// to periodic radio-resource reports and pushes allocation commands back;
// the RAN side acknowledges or rejects each command.
enum class MsgType {
    SubscriptionRequest,
    SubscriptionResponse,
    ReportIndication,
    ControlRequest,
    ControlAck,
    ControlFailure,
};

std::string to_string(MsgType type);
std::optional<MsgType> msg_type_from_string(const std::string& name);

/// Report period in slots; used by SubscriptionRequest and echoed by
/// SubscriptionResponse.
struct SubscriptionPayload {
    int period = 1;
};

/// Per-user observable state carried by a ReportIndication.
struct ReportPayload {
    std::vector<UserState> users;
};

/// Allocation carried by a ControlRequest.
struct ControlPayload {
    AllocationAction action;
};

/// Human-readable rejection reason carried by a ControlFailure.
struct FailurePayload {
    std::string reason;
};

/// std::monostate covers ControlAck's empty payload.
using E2Payload = std::variant<std::monostate, SubscriptionPayload, ReportPayload,
                               ControlPayload, FailurePayload>;

// One framed message. Wire format: 4-byte big-endian body length, then the
// body as canonical UTF-8 JSON (keys sorted, so equal messages encode to
// identical bytes) with top-level fields "correlation_id", "msg_type", and
// "payload".
struct E2Message {
    MsgType msg_type = MsgType::ControlAck;
    std::uint64_t correlation_id = 0;
    E2Payload payload;
};

/// Canonical JSON body (without the length prefix). Throws
/// std::invalid_argument when the payload alternative does not match the
/// message type.
nlohmann::json to_json(const E2Message& msg);

/// Equality via the canonical encoding (doubles compare exactly).
bool operator==(const E2Message& a, const E2Message& b);

// Raised when a byte stream violates the protocol: malformed frame, unknown
// msg_type, or a mid-stream message the receiving endpoint cannot accept.
// frame_length carries the declared body length of the offending frame
// (0 when the error is not tied to a specific frame).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what, std::size_t frame_length = 0)
        : std::runtime_error(what), frame_length_(frame_length) {}

    std::size_t frame_length() const { return frame_length_; }

private:
    std::size_t frame_length_ = 0;
};

/// Bodies larger than this are rejected as a desync guard; real payloads are
/// a few kilobytes, so a bigger declared length means a corrupt prefix.
inline constexpr std::size_t kMaxFrameBody = std::size_t{1} << 26;

/// Serialize one message to its framed byte representation. Deterministic:
/// two encodes of the same message are byte-identical.
std::vector<std::uint8_t> encode(const E2Message& msg);

enum class DecodeStatus { Ok, NeedMoreBytes, Error };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::NeedMoreBytes;
    /// Bytes to drop from the front of the stream (set on Ok, and on Error
    /// when the full offending frame was available to skip).
    std::size_t consumed = 0;
    /// Declared body length of the frame (0 if the prefix itself was short).
    std::size_t frame_length = 0;
    std::optional<E2Message> message;  // engaged on Ok
    std::string error;                 // set on Error
};

/// Decode the first frame of `bytes`. An incomplete prefix or body yields
/// NeedMoreBytes; an unknown msg_type or malformed body yields Error with
/// the offending frame's length.
DecodeResult decode(std::span<const std::uint8_t> bytes);

// Incremental decoder: feed arbitrary chunks, pull complete messages.
// Message boundaries never depend on chunk boundaries.
class FrameReader {
public:
    void feed(std::span<const std::uint8_t> chunk);

    /// Next complete message, or nullopt until more bytes arrive.
    /// Throws ProtocolError on a malformed frame.
    std::optional<E2Message> next();

    std::size_t buffered() const { return buffer_.size() - offset_; }

private:
    std::vector<std::uint8_t> buffer_;
    std::size_t offset_ = 0;
};

// RAN-side view of the (single) radio-resource report subscription.
struct SubscriptionState {
    bool active = false;
    int period = 1;                  // slots between reports
    std::uint64_t subscriber_id = 0; // correlation id of the subscribing request
};

/// The periodic report gate: a ReportIndication carrying `states` iff the
/// subscription is active and the slot lands on the period grid
/// (slot % period == 0).
std::optional<E2Message> ran_endpoint_step(const SubscriptionState& sub, std::uint64_t slot,
                                           std::span<const UserState> states,
                                           std::uint64_t correlation_id);

/// Validate a ControlRequest's action against the config budgets and the
/// hit-ratio range. Returns a ControlAck on success, otherwise a
/// ControlFailure with the violation reason; both echo the request's
/// correlation id. Throws ProtocolError if `request` is not a ControlRequest.
E2Message ran_apply_control(const E2Message& request, const SystemConfig& cfg);

// The xApp's message factory; correlation ids increase strictly from 0.
class XappEndpoint {
public:
    E2Message subscription_request(int period);
    E2Message control_request(const AllocationAction& action);

    /// Number of correlation ids issued so far (the next id to be assigned).
    std::uint64_t issued() const { return next_correlation_; }

private:
    std::uint64_t next_correlation_ = 0;
};

/// One xApp decision: run `policy` on the user states carried by
/// `indication`, normalize the raw output onto the budgets, and wrap the
/// allocation in a fresh ControlRequest. Throws ProtocolError when the
/// message is not a ReportIndication or its user count does not match `cfg`.
E2Message xapp_control_round(XappEndpoint& xapp, Policy& policy, const E2Message& indication,
                             const SystemConfig& cfg, bool explore, Rng& rng);

// RAN-side endpoint: owns the environment, the subscription, and its own
// correlation counter for outbound indications. A valid ControlRequest is
// acknowledged and handed to the environment, advancing it one slot.
class RanEndpoint {
public:
    RanEndpoint(SystemConfig cfg, std::uint64_t env_seed)
        : env_(std::move(cfg), env_seed) {}

    /// New episode: resample user states, drop the last outcome. The
    /// subscription (if any) stays active.
    const std::vector<UserState>& reset();

    /// The due ReportIndication for this slot, if any (see ran_endpoint_step).
    std::optional<E2Message> poll_report(std::uint64_t slot);

    /// Dispatch a SubscriptionRequest or ControlRequest, returning the reply.
    /// Other message types are a ProtocolError.
    E2Message handle(const E2Message& inbound);

    const Environment& env() const { return env_; }
    const SubscriptionState& subscription() const { return sub_; }
    const std::optional<StepOutcome>& last_outcome() const { return last_outcome_; }

private:
    Environment env_;
    SubscriptionState sub_;
    std::uint64_t next_correlation_ = 0;
    std::optional<StepOutcome> last_outcome_;
};

}  // namespace imvol
