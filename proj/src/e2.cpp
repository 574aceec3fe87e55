#include "imvol/e2.hpp"

#include <algorithm>

namespace imvol {

namespace {

nlohmann::json user_to_json(const UserState& u) {
    return {{"a_comp", u.a_comp}, {"a_dl", u.a_dl}, {"a_ul", u.a_ul},
            {"gain", u.gain},     {"p_ul", u.p_ul}, {"tier", u.tier}};
}

UserState user_from_json(const nlohmann::json& j) {
    UserState u;
    u.gain = j.at("gain").get<double>();
    u.a_ul = j.at("a_ul").get<double>();
    u.a_comp = j.at("a_comp").get<double>();
    u.a_dl = j.at("a_dl").get<double>();
    u.p_ul = j.at("p_ul").get<double>();
    u.tier = j.at("tier").get<int>();
    return u;
}

nlohmann::json action_to_json(const AllocationAction& a) {
    return {{"b_dl", a.b_dl}, {"b_ul", a.b_ul}, {"f", a.f}, {"p_dl", a.p_dl}, {"phi", a.phi}};
}

AllocationAction action_from_json(const nlohmann::json& j) {
    AllocationAction a;
    a.b_ul = j.at("b_ul").get<std::vector<double>>();
    a.f = j.at("f").get<std::vector<double>>();
    a.b_dl = j.at("b_dl").get<std::vector<double>>();
    a.p_dl = j.at("p_dl").get<std::vector<double>>();
    a.phi = j.at("phi").get<std::vector<double>>();
    const std::size_t u = a.phi.size();
    if (a.b_ul.size() != u || a.f.size() != u || a.b_dl.size() != u || a.p_dl.size() != u) {
        throw ProtocolError("control payload: allocation groups differ in length");
    }
    return a;
}

}  // namespace

std::string to_string(MsgType type) {
    switch (type) {
        case MsgType::SubscriptionRequest: return "SubscriptionRequest";
        case MsgType::SubscriptionResponse: return "SubscriptionResponse";
        case MsgType::ReportIndication: return "ReportIndication";
        case MsgType::ControlRequest: return "ControlRequest";
        case MsgType::ControlAck: return "ControlAck";
        case MsgType::ControlFailure: return "ControlFailure";
    }
    throw std::invalid_argument("to_string: unknown MsgType");
}

std::optional<MsgType> msg_type_from_string(const std::string& name) {
    if (name == "SubscriptionRequest") return MsgType::SubscriptionRequest;
    if (name == "SubscriptionResponse") return MsgType::SubscriptionResponse;
    if (name == "ReportIndication") return MsgType::ReportIndication;
    if (name == "ControlRequest") return MsgType::ControlRequest;
    if (name == "ControlAck") return MsgType::ControlAck;
    if (name == "ControlFailure") return MsgType::ControlFailure;
    return std::nullopt;
}

nlohmann::json to_json(const E2Message& msg) {
    nlohmann::json payload;
    bool coherent = false;
    switch (msg.msg_type) {
        case MsgType::SubscriptionRequest:
        case MsgType::SubscriptionResponse:
            if (const auto* sub = std::get_if<SubscriptionPayload>(&msg.payload)) {
                payload = {{"period", sub->period}};
                coherent = true;
            }
            break;
        case MsgType::ReportIndication:
            if (const auto* report = std::get_if<ReportPayload>(&msg.payload)) {
                nlohmann::json users = nlohmann::json::array();
                for (const UserState& u : report->users) users.push_back(user_to_json(u));
                payload = {{"users", std::move(users)}};
                coherent = true;
            }
            break;
        case MsgType::ControlRequest:
            if (const auto* control = std::get_if<ControlPayload>(&msg.payload)) {
                payload = {{"action", action_to_json(control->action)}};
                coherent = true;
            }
            break;
        case MsgType::ControlAck:
            if (std::holds_alternative<std::monostate>(msg.payload)) {
                payload = nlohmann::json::object();
                coherent = true;
            }
            break;
        case MsgType::ControlFailure:
            if (const auto* failure = std::get_if<FailurePayload>(&msg.payload)) {
                payload = {{"reason", failure->reason}};
                coherent = true;
            }
            break;
    }
    if (!coherent) {
        throw std::invalid_argument("to_json: payload does not match msg_type " +
                                    to_string(msg.msg_type));
    }
    nlohmann::json doc;
    doc["correlation_id"] = msg.correlation_id;
    doc["msg_type"] = to_string(msg.msg_type);
    doc["payload"] = std::move(payload);
    return doc;
}

bool operator==(const E2Message& a, const E2Message& b) { return to_json(a) == to_json(b); }

std::vector<std::uint8_t> encode(const E2Message& msg) {
    const std::string body = to_json(msg).dump();
    if (body.size() > kMaxFrameBody) {
        throw std::length_error("encode: message body exceeds the frame limit");
    }
    const auto n = static_cast<std::uint32_t>(body.size());
    std::vector<std::uint8_t> out;
    out.reserve(4 + body.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

DecodeResult decode(std::span<const std::uint8_t> bytes) {
    DecodeResult result;
    if (bytes.size() < 4) return result;  // incomplete length prefix
    const std::size_t n = (static_cast<std::size_t>(bytes[0]) << 24) |
                          (static_cast<std::size_t>(bytes[1]) << 16) |
                          (static_cast<std::size_t>(bytes[2]) << 8) |
                          static_cast<std::size_t>(bytes[3]);
    result.frame_length = n;
    if (n > kMaxFrameBody) {
        result.status = DecodeStatus::Error;
        result.error = "declared frame length " + std::to_string(n) +
                       " exceeds the protocol limit";
        return result;  // nothing consumed: the stream is unrecoverable
    }
    if (bytes.size() < 4 + n) return result;  // incomplete body
    result.consumed = 4 + n;

    const auto* body = reinterpret_cast<const char*>(bytes.data() + 4);
    const nlohmann::json doc = nlohmann::json::parse(body, body + n, nullptr, false);
    auto fail = [&](std::string why) {
        result.status = DecodeStatus::Error;
        result.error = std::move(why);
        result.message.reset();
        return result;
    };
    if (doc.is_discarded() || !doc.is_object()) return fail("malformed JSON body");

    try {
        const auto type_name = doc.at("msg_type").get<std::string>();
        const auto type = msg_type_from_string(type_name);
        if (!type) return fail("unknown msg_type \"" + type_name + "\"");

        E2Message msg;
        msg.msg_type = *type;
        msg.correlation_id = doc.at("correlation_id").get<std::uint64_t>();
        const nlohmann::json& payload = doc.at("payload");
        switch (*type) {
            case MsgType::SubscriptionRequest:
            case MsgType::SubscriptionResponse: {
                const int period = payload.at("period").get<int>();
                if (period < 1) return fail("subscription period must be >= 1");
                msg.payload = SubscriptionPayload{period};
                break;
            }
            case MsgType::ReportIndication: {
                ReportPayload report;
                for (const nlohmann::json& j : payload.at("users")) {
                    report.users.push_back(user_from_json(j));
                }
                msg.payload = std::move(report);
                break;
            }
            case MsgType::ControlRequest:
                msg.payload = ControlPayload{action_from_json(payload.at("action"))};
                break;
            case MsgType::ControlAck:
                msg.payload = std::monostate{};
                break;
            case MsgType::ControlFailure:
                msg.payload = FailurePayload{payload.at("reason").get<std::string>()};
                break;
        }
        result.status = DecodeStatus::Ok;
        result.message = std::move(msg);
    } catch (const nlohmann::json::exception& e) {
        return fail(e.what());
    } catch (const ProtocolError& e) {
        return fail(e.what());
    }
    return result;
}

void FrameReader::feed(std::span<const std::uint8_t> chunk) {
    if (offset_ > 0) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(offset_));
        offset_ = 0;
    }
    buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
}

std::optional<E2Message> FrameReader::next() {
    DecodeResult result = decode(std::span<const std::uint8_t>(buffer_).subspan(offset_));
    switch (result.status) {
        case DecodeStatus::Ok:
            offset_ += result.consumed;
            return std::move(result.message);
        case DecodeStatus::NeedMoreBytes:
            return std::nullopt;
        case DecodeStatus::Error:
            throw ProtocolError(result.error, result.frame_length);
    }
    throw std::logic_error("FrameReader::next: unreachable");
}

std::optional<E2Message> ran_endpoint_step(const SubscriptionState& sub, std::uint64_t slot,
                                           std::span<const UserState> states,
                                           std::uint64_t correlation_id) {
    if (!sub.active || sub.period < 1 ||
        slot % static_cast<std::uint64_t>(sub.period) != 0) {
        return std::nullopt;
    }
    E2Message msg;
    msg.msg_type = MsgType::ReportIndication;
    msg.correlation_id = correlation_id;
    msg.payload = ReportPayload{std::vector<UserState>(states.begin(), states.end())};
    return msg;
}

E2Message ran_apply_control(const E2Message& request, const SystemConfig& cfg) {
    if (request.msg_type != MsgType::ControlRequest ||
        !std::holds_alternative<ControlPayload>(request.payload)) {
        throw ProtocolError("ran_apply_control: message is not a ControlRequest");
    }
    const AllocationAction& action = std::get<ControlPayload>(request.payload).action;
    E2Message reply;
    reply.correlation_id = request.correlation_id;
    if (const auto reason = validate_action(action, cfg)) {
        reply.msg_type = MsgType::ControlFailure;
        reply.payload = FailurePayload{*reason};
    } else {
        reply.msg_type = MsgType::ControlAck;
        reply.payload = std::monostate{};
    }
    return reply;
}

E2Message XappEndpoint::subscription_request(int period) {
    if (period < 1) throw std::invalid_argument("subscription_request: period must be >= 1");
    E2Message msg;
    msg.msg_type = MsgType::SubscriptionRequest;
    msg.correlation_id = next_correlation_++;
    msg.payload = SubscriptionPayload{period};
    return msg;
}

E2Message XappEndpoint::control_request(const AllocationAction& action) {
    E2Message msg;
    msg.msg_type = MsgType::ControlRequest;
    msg.correlation_id = next_correlation_++;
    msg.payload = ControlPayload{action};
    return msg;
}

E2Message xapp_control_round(XappEndpoint& xapp, Policy& policy, const E2Message& indication,
                             const SystemConfig& cfg, bool explore, Rng& rng) {
    if (indication.msg_type != MsgType::ReportIndication ||
        !std::holds_alternative<ReportPayload>(indication.payload)) {
        throw ProtocolError("xapp_control_round: expected a ReportIndication");
    }
    const auto& users = std::get<ReportPayload>(indication.payload).users;
    if (users.size() != static_cast<std::size_t>(cfg.num_users)) {
        throw ProtocolError("xapp_control_round: reported user count does not match config");
    }
    const std::vector<double> raw = policy.act(users, cfg, explore, rng);
    return xapp.control_request(normalize_action(raw, cfg));
}

const std::vector<UserState>& RanEndpoint::reset() {
    last_outcome_.reset();
    return env_.reset();
}

std::optional<E2Message> RanEndpoint::poll_report(std::uint64_t slot) {
    auto msg = ran_endpoint_step(sub_, slot, env_.states(), next_correlation_);
    if (msg) ++next_correlation_;
    return msg;
}

E2Message RanEndpoint::handle(const E2Message& inbound) {
    switch (inbound.msg_type) {
        case MsgType::SubscriptionRequest: {
            const auto* sub = std::get_if<SubscriptionPayload>(&inbound.payload);
            if (!sub) throw ProtocolError("RanEndpoint: subscription request without period");
            // a re-subscription replaces the existing one, so there is never
            // more than one active subscription on this endpoint
            sub_.active = true;
            sub_.period = sub->period;
            sub_.subscriber_id = inbound.correlation_id;
            E2Message response;
            response.msg_type = MsgType::SubscriptionResponse;
            response.correlation_id = inbound.correlation_id;
            response.payload = SubscriptionPayload{sub->period};
            return response;
        }
        case MsgType::ControlRequest: {
            E2Message reply = ran_apply_control(inbound, env_.config());
            if (reply.msg_type == MsgType::ControlAck) {
                last_outcome_ = env_.step(std::get<ControlPayload>(inbound.payload).action);
            }
            return reply;
        }
        default:
            throw ProtocolError("RanEndpoint: unexpected message type " +
                                to_string(inbound.msg_type));
    }
}

}  // namespace imvol
