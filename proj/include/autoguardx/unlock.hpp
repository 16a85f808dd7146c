#pragma once
// Keyless-entry endpoints over the RF channel.
//
// Protected profile: press → Hello → vehicle challenges with a fresh 16-byte
// nonce → fob answers with a rolling code whose pad field folds in the nonce
// → vehicle checks round-trip time against τ before verifying the code.
// Factory profile: the fob transmits one fixed code; the vehicle does a byte
// compare. That asymmetry is what the replay/relay scenarios measure.

#include <optional>

#include "autoguardx/events.hpp"
#include "autoguardx/rf.hpp"
#include "autoguardx/rng.hpp"
#include "autoguardx/rolling_code.hpp"

namespace agx {

enum class UnlockOutcome : uint8_t {
    Unlocked,
    RejectedReplay,
    RejectedBadCode,
    RejectedWindow,
    RejectedLatencyBound,
    RejectedTimeout,
    RejectedUnsolicited,
};

inline const char* unlock_outcome_name(UnlockOutcome o) {
    switch (o) {
        case UnlockOutcome::Unlocked: return "unlocked";
        case UnlockOutcome::RejectedReplay: return "rejected_replay";
        case UnlockOutcome::RejectedBadCode: return "rejected_bad_code";
        case UnlockOutcome::RejectedWindow: return "rejected_window";
        case UnlockOutcome::RejectedLatencyBound: return "rejected_latency_bound";
        case UnlockOutcome::RejectedTimeout: return "rejected_timeout";
        case UnlockOutcome::RejectedUnsolicited: return "rejected_unsolicited";
    }
    return "?";
}

namespace wire {
constexpr uint8_t kHello = 'H';
constexpr uint8_t kChallenge = 'C';
constexpr uint8_t kResponse = 'R';
constexpr uint8_t kStaticUnlock = 'U';
}  // namespace wire

constexpr Time kDefaultRttBound = 4'000;       // τ
constexpr Time kDefaultUnlockTimeout = 100'000;

// Fixed code a factory fob transmits on every press.
inline std::array<uint8_t, 16> factory_static_code(const Bytes& key, uint32_t fob_id) {
    return rolling_code(key, 0, fob_id);
}

class FobUnit {
public:
    FobUnit(RfChannel& ch, RollingCodeState state, bool rolling)
        : channel_(ch), state_(std::move(state)), rolling_(rolling) {
        channel_.on_fob_rx([this](const RfMessage& m) { on_rx(m); });
    }

    void press() {
        if (!rolling_) {
            Bytes msg{wire::kStaticUnlock};
            put_be32(msg, state_.fob_id);
            auto code = factory_static_code(state_.key, state_.fob_id);
            msg.insert(msg.end(), code.begin(), code.end());
            channel_.send(RfDirection::FobToVehicle, std::move(msg));
            return;
        }
        awaiting_challenge_ = true;
        Bytes hello{wire::kHello};
        put_be32(hello, state_.fob_id);
        channel_.send(RfDirection::FobToVehicle, std::move(hello));
    }

    uint64_t counter() const { return state_.counter; }

private:
    void on_rx(const RfMessage& m) {
        // Only a challenge provoked by this fob's own press wakes it; the fob
        // stays silent for challenges other transmitters solicited.
        if (!rolling_ || !awaiting_challenge_) return;
        if (m.payload.size() != 17 || m.payload[0] != wire::kChallenge) return;
        awaiting_challenge_ = false;
        CodePad pad = nonce_pad(std::span<const uint8_t>(m.payload.data() + 1, 16));
        KeyFobMessage reply = fob_generate(state_, pad);
        Bytes out{wire::kResponse};
        Bytes body = serialize(reply);
        out.insert(out.end(), body.begin(), body.end());
        channel_.send(RfDirection::FobToVehicle, std::move(out));
    }

    RfChannel& channel_;
    RollingCodeState state_;
    bool rolling_;
    bool awaiting_challenge_ = false;
};

class VehicleUnlockUnit {
public:
    using OutcomeFn = std::function<void(UnlockOutcome)>;

    VehicleUnlockUnit(Kernel& k, RfChannel& ch, RollingCodeState state, bool rolling, Rng nonce_rng,
                      EventSink events, Time rtt_bound = kDefaultRttBound,
                      Time timeout = kDefaultUnlockTimeout)
        : kernel_(k),
          channel_(ch),
          state_(std::move(state)),
          rolling_(rolling),
          rng_(nonce_rng),
          events_(std::move(events)),
          rtt_bound_(rtt_bound),
          timeout_(timeout) {
        channel_.on_vehicle_rx([this](const RfMessage& m) { on_rx(m); });
        if (!rolling_) static_code_ = factory_static_code(state_.key, state_.fob_id);
    }

    void on_outcome(OutcomeFn fn) { outcome_fn_ = std::move(fn); }
    void on_unlock(std::function<void()> fn) { unlock_fn_ = std::move(fn); }

    uint64_t accepted_count() const { return accepted_; }
    uint64_t counter() const { return state_.counter; }

private:
    void on_rx(const RfMessage& m) {
        if (m.payload.empty()) return;
        if (!rolling_) {
            if (m.payload[0] == wire::kStaticUnlock && m.payload.size() == 21 &&
                read_be32(m.payload.data() + 1) == state_.fob_id &&
                ct_equal(std::span<const uint8_t>(m.payload.data() + 5, 16), static_code_))
                finish(UnlockOutcome::Unlocked);
            return;
        }
        switch (m.payload[0]) {
            case wire::kHello: {
                if (m.payload.size() != 5 || read_be32(m.payload.data() + 1) != state_.fob_id) return;
                challenge_nonce_ = rng_.bytes<16>();
                Bytes c{wire::kChallenge};
                c.insert(c.end(), challenge_nonce_->begin(), challenge_nonce_->end());
                challenge_sent_at_ = kernel_.now();
                channel_.send(RfDirection::VehicleToFob, std::move(c));
                timeout_event_ = kernel_.schedule_in(timeout_, [this] {
                    challenge_nonce_.reset();
                    event(EventClass::AuthFailure, Severity::Info, "challenge timed out");
                    finish(UnlockOutcome::RejectedTimeout);
                });
                break;
            }
            case wire::kResponse: {
                auto msg = parse_fob_message(std::span<const uint8_t>(m.payload.data() + 1, m.payload.size() - 1));
                if (!msg) return;
                if (!challenge_nonce_) {
                    event(EventClass::AuthFailure, Severity::Critical, "unsolicited unlock response");
                    finish(UnlockOutcome::RejectedUnsolicited);
                    return;
                }
                kernel_.cancel(timeout_event_);
                CodePad pad = nonce_pad(*challenge_nonce_);
                challenge_nonce_.reset();
                Time rtt = kernel_.now() - challenge_sent_at_;
                if (rtt > rtt_bound_) {
                    event(EventClass::AuthFailure, Severity::Critical, "round-trip above bound");
                    event(EventClass::RelaySuspect, Severity::Critical,
                          "rtt " + std::to_string(rtt) + "us exceeds " + std::to_string(rtt_bound_) + "us");
                    finish(UnlockOutcome::RejectedLatencyBound);
                    return;
                }
                switch (vehicle_verify(state_, *msg, pad)) {
                    case RollingVerdict::Accept:
                        ++accepted_;
                        event(EventClass::UnlockAccepted, Severity::Info, "rolling code accepted");
                        finish(UnlockOutcome::Unlocked);
                        break;
                    case RollingVerdict::Replay:
                        event(EventClass::AuthFailure, Severity::Critical, "replayed rolling counter");
                        finish(UnlockOutcome::RejectedReplay);
                        break;
                    case RollingVerdict::BadCode:
                        event(EventClass::AuthFailure, Severity::Critical, "rolling code mismatch");
                        finish(UnlockOutcome::RejectedBadCode);
                        break;
                    case RollingVerdict::WindowExceeded:
                        event(EventClass::AuthFailure, Severity::Critical, "counter outside window");
                        finish(UnlockOutcome::RejectedWindow);
                        break;
                }
                break;
            }
            default:
                break;
        }
    }

    void finish(UnlockOutcome o) {
        if (o == UnlockOutcome::Unlocked) {
            if (!rolling_) ++accepted_;
            if (unlock_fn_) unlock_fn_();
        }
        if (outcome_fn_) outcome_fn_(o);
    }

    void event(EventClass cls, Severity sev, std::string detail) {
        if (!events_) return;
        events_({cls, sev, kernel_.now(), fob_subject(state_.fob_id),
                 Bytes(detail.begin(), detail.end())});
    }

    Kernel& kernel_;
    RfChannel& channel_;
    RollingCodeState state_;
    bool rolling_;
    Rng rng_;
    EventSink events_;
    Time rtt_bound_;
    Time timeout_;
    std::array<uint8_t, 16> static_code_{};
    std::optional<std::array<uint8_t, 16>> challenge_nonce_;
    Time challenge_sent_at_ = 0;
    EventHandle timeout_event_ = 0;
    uint64_t accepted_ = 0;
    OutcomeFn outcome_fn_;
    std::function<void()> unlock_fn_;
};

}  // namespace agx
