#pragma once

// Scripted attacker behaviours for the evaluation scenarios.  Every attack is
// a pure event generator: it schedules traffic (RF, CAN, OBD, sensor) from
// observable inputs only, so removing or altering the defense stack never
// changes the bytes an attacker emits.  Each scripted instance carries a
// ground-truth label that the scorer joins against alert records.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "autoguardx/bytes.hpp"
#include "autoguardx/can.hpp"
#include "autoguardx/kernel.hpp"
#include "autoguardx/obd.hpp"
#include "autoguardx/rf.hpp"
#include "autoguardx/rng.hpp"
#include "autoguardx/rolling_code.hpp"
#include "autoguardx/sensors.hpp"
#include "autoguardx/unlock.hpp"

namespace agx {

enum class AttackKind {
    RfReplay,
    RfRelay,
    CanInjection,
    CanFlood,
    ObdReprogram,
    UsbExfiltration,
    GlassBreak,
    FobSpoof,
};

inline const char* attack_kind_name(AttackKind k) {
    switch (k) {
        case AttackKind::RfReplay: return "rf_replay";
        case AttackKind::RfRelay: return "rf_relay";
        case AttackKind::CanInjection: return "can_injection";
        case AttackKind::CanFlood: return "can_flood";
        case AttackKind::ObdReprogram: return "obd_reprogram";
        case AttackKind::UsbExfiltration: return "usb_exfiltration";
        case AttackKind::GlassBreak: return "glass_break";
        case AttackKind::FobSpoof: return "fob_spoof";
    }
    return "?";
}

// The attacker prefix on injected frame sources; scoring uses it to separate
// benign from hostile traffic when computing false-positive rates.
inline std::string attack_source(const char* tag) { return std::string("atk:") + tag; }

// --- RF capture and replay ------------------------------------------------

// Passive SDR listener on the fob uplink.  Records every fob transmission it
// hears, byte-exact, with its arrival time.
class RfRecorder {
public:
    explicit RfRecorder(RfChannel& channel, RfDirection dir = RfDirection::FobToVehicle) {
        channel.add_tap([this, dir](const RfMessage& m) {
            if (m.direction == dir)
                recorded_.push_back({m.emit_time + m.path_latency, m.payload});
        });
    }

    struct Recording {
        Time heard_at;
        Bytes payload;
    };

    const std::vector<Recording>& recordings() const { return recorded_; }

    std::vector<Recording> in_window(Time t0, Time t1) const {
        if (t0 >= t1) return {};
        std::vector<Recording> out;
        for (const auto& r : recorded_)
            if (r.heard_at >= t0 && r.heard_at < t1) out.push_back(r);
        return out;
    }

private:
    std::vector<Recording> recorded_;
};

// Re-emits a captured fob transmission at the current virtual time.
inline void rf_replay(Kernel& kernel, RfChannel& channel, const Bytes& recording) {
    if (recording.empty()) throw std::invalid_argument("rf_replay: empty recording");
    (void)kernel;
    channel.send(RfDirection::FobToVehicle, recording);
}

// Replays a whole captured uplink exchange in its original order.  Against a
// fixed-code receiver one message is the entire exchange; against the
// challenge protocol the replayed greeting provokes a fresh challenge and the
// replayed answer then carries a stale counter.
inline void rf_replay_exchange(Kernel& kernel, RfChannel& channel,
                               std::vector<Bytes> messages, Time start,
                               Time spacing = 3'000) {
    if (messages.empty()) throw std::invalid_argument("rf_replay_exchange: nothing captured");
    Time at = start;
    for (auto& m : messages) {
        kernel.schedule(at, [&channel, msg = std::move(m)] {
            channel.send(RfDirection::FobToVehicle, msg);
        });
        at += spacing;
    }
}

// Live two-way relay: adds latency to both legs for the attack window and
// presses the (distant) victim fob so the vehicle hears it.  The relay
// removes itself when the window closes.
inline void rf_relay_window(Kernel& kernel, RfChannel& channel, FobUnit& fob,
                            Time start, Time duration, Time added_rtt) {
    kernel.schedule(start, [&channel, &fob, added_rtt] {
        channel.set_leg_extra(added_rtt / 2, added_rtt - added_rtt / 2);
        fob.press();
    });
    kernel.schedule(start + duration, [&channel] { channel.clear_relay(); });
}

// --- CAN injection and flood ----------------------------------------------

// Emits unauthenticated frames with a fixed id and payload at a steady rate.
// The frames carry no companion tag, exactly like a device spliced onto the
// wiring harness would send them.
inline void can_inject(Kernel& kernel, CanBus& bus, Segment seg, uint16_t id,
                       const Bytes& payload, double rate_fps, Time start,
                       Time duration) {
    if (rate_fps <= 0.0) throw std::invalid_argument("can_inject: rate must be positive");
    const Time period = static_cast<Time>(1e6 / rate_fps);
    const Time end = start + duration;
    auto fire = std::make_shared<std::function<void()>>();
    *fire = [&kernel, &bus, seg, id, payload, period, end, fire] {
        CanFrame f;
        f.id = id;
        f.payload = payload;
        f.segment = seg;
        f.source = attack_source("inject");
        bus.transmit(f);
        const Time next = kernel.now() + period;
        if (next < end) kernel.schedule(next, [fire] { (*fire)(); });
    };
    kernel.schedule(start, [fire] { (*fire)(); });
}

// Random-id flood.  Ids are drawn uniformly over the 11-bit space minus the
// protected set, so the storm lands on ids the vehicle never uses.
inline void can_flood(Kernel& kernel, CanBus& bus, Segment seg, double rate_fps,
                      Time start, Time duration,
                      std::unordered_set<uint16_t> exclude, Rng rng) {
    if (rate_fps < 1.0) throw std::invalid_argument("can_flood: rate must be >= 1");
    const Time period = std::max<Time>(1, static_cast<Time>(1e6 / rate_fps));
    const Time end = start + duration;
    auto state = std::make_shared<std::pair<std::unordered_set<uint16_t>, Rng>>(
        std::move(exclude), rng);
    auto fire = std::make_shared<std::function<void()>>();
    *fire = [&kernel, &bus, seg, period, end, state, fire] {
        uint16_t id;
        do {
            id = static_cast<uint16_t>(state->second.next_below(kMaxCanId + 1));
        } while (state->first.count(id));
        CanFrame f;
        f.id = id;
        f.payload.resize(8);
        state->second.fill(f.payload.data(), f.payload.size());
        f.segment = seg;
        f.source = attack_source("flood");
        bus.transmit(f);
        const Time next = kernel.now() + period;
        if (next < end) kernel.schedule(next, [fire] { (*fire)(); });
    };
    kernel.schedule(start, [fire] { (*fire)(); });
}

// --- OBD and storage ------------------------------------------------------

struct ObdAttackResult {
    bool succeeded = false;
    uint32_t programmed_fob = 0;
};

// Plugs an unauthorized programmer into the diagnostic port and tries to
// provision a new fob.  Without the device key the authentication response is
// a guess; against the factory port no authentication is asked for at all.
inline ObdAttackResult obd_reprogram_attempt(ObdPort& port, uint32_t device_id,
                                             uint32_t new_fob_id, Rng& rng) {
    ObdAttackResult out;
    auto& session = port.connect(device_id);
    if (!port.enforcing()) {
        // Factory port: programming is open to whoever plugs in.
        if (port.program_key(session.session_id, new_fob_id)) {
            out.succeeded = true;
            out.programmed_fob = new_fob_id;
        }
        return out;
    }
    Bytes guess(16);
    rng.fill(guess.data(), guess.size());
    if (port.respond(session.session_id, guess) == ObdPort::AuthResult::Authenticated &&
        port.program_key(session.session_id, new_fob_id)) {
        out.succeeded = true;
        out.programmed_fob = new_fob_id;
    }
    return out;
}

struct ExfiltrationResult {
    Bytes image;             // raw bytes lifted from the log store
    bool marker_found = false;  // plaintext marker located in the image
};

// Scans a lifted storage image for a plaintext marker string.
inline bool contains_marker(const Bytes& image, const std::string& marker) {
    if (marker.empty() || image.size() < marker.size()) return false;
    const auto it = std::search(image.begin(), image.end(), marker.begin(), marker.end());
    return it != image.end();
}

// Copies the stored log bytes out through the diagnostic connector and scans
// them for readable content.  The copy itself always succeeds — the question
// the scenario answers is whether the bytes are worth anything.
inline ExfiltrationResult usb_exfiltrate(const Bytes& stored_image,
                                         const std::string& marker = "UNLOCK") {
    ExfiltrationResult out;
    out.image = stored_image;
    out.marker_found = contains_marker(stored_image, marker);
    return out;
}

// --- physical and RF spoofing ---------------------------------------------

// Drives a punch spike into the vibration stream: sharp attack, short sustain.
inline void glass_break(VibrationSensor& sensor, Time at, double peak_g,
                        Time duration) {
    if (peak_g <= 0.0) throw std::invalid_argument("glass_break: peak must be positive");
    sensor.add_spike(at, duration, peak_g);
}

// Active fob impersonation.  The spoofer eavesdrops on the link via a tap.
// If it has overheard a fixed-code unlock message it simply re-emits those
// bytes (that is spoofing against a static-code system).  Otherwise it speaks
// the challenge protocol and signs with a guessed key: counters travel in
// cleartext, so it reads the victim's counter off any genuine response and
// forges ahead of it — landing inside the acceptance window, where the code
// check itself is what rejects it.  Either way its emissions depend only on
// traffic it can hear, never on defense internals.
class SpooferFob {
public:
    SpooferFob(Kernel& kernel, RfChannel& channel, uint32_t fob_id, Rng rng)
        : kernel_(kernel), channel_(channel), fob_id_(fob_id), rng_(std::move(rng)),
          guessed_key_(16) {
        rng_.fill(guessed_key_.data(), guessed_key_.size());
        channel_.add_tap([this](const RfMessage& m) { on_tap(m); });
    }

    // Starts `attempts` spoof exchanges spaced `interval` apart.
    void run(Time start, int attempts, Time interval) {
        for (int i = 0; i < attempts; ++i)
            kernel_.schedule(start + static_cast<Time>(i) * interval, [this] { attempt(); });
    }

    uint64_t responses_sent() const { return responses_sent_; }
    bool captured_static() const { return captured_static_.has_value(); }

private:
    void attempt() {
        if (captured_static_) {
            ++responses_sent_;
            channel_.send(RfDirection::FobToVehicle, *captured_static_);
            return;
        }
        awaiting_challenge_ = true;
        Bytes msg{wire::kHello};
        put_be32(msg, fob_id_);
        channel_.send(RfDirection::FobToVehicle, std::move(msg));
    }

    void on_tap(const RfMessage& m) {
        if (m.payload.empty()) return;
        if (m.direction == RfDirection::FobToVehicle) {
            if (m.payload[0] == wire::kStaticUnlock) captured_static_ = m.payload;
            if (m.payload[0] == wire::kResponse && m.payload.size() > 1) {
                auto heard = parse_fob_message(
                    std::span<const uint8_t>(m.payload.data() + 1, m.payload.size() - 1));
                if (heard && heard->fob_id == fob_id_ && heard->counter >= counter_guess_)
                    counter_guess_ = heard->counter + 1;
            }
            return;
        }
        // Vehicle-to-fob leg: answer only challenges this spoofer provoked.
        if (!awaiting_challenge_ || m.payload[0] != wire::kChallenge || m.payload.size() != 17)
            return;
        awaiting_challenge_ = false;
        CodePad pad = nonce_pad(std::span<const uint8_t>(m.payload.data() + 1, 16));
        KeyFobMessage forged;
        forged.fob_id = fob_id_;
        forged.counter = counter_guess_++;
        forged.code = rolling_code(guessed_key_, forged.counter, fob_id_, pad);
        Bytes msg{wire::kResponse};
        const Bytes body = serialize(forged);
        msg.insert(msg.end(), body.begin(), body.end());
        ++responses_sent_;
        channel_.send(RfDirection::FobToVehicle, std::move(msg));
    }

    Kernel& kernel_;
    RfChannel& channel_;
    uint32_t fob_id_;
    Rng rng_;
    Bytes guessed_key_;
    std::optional<Bytes> captured_static_;
    bool awaiting_challenge_ = false;
    uint64_t counter_guess_ = 1;
    uint64_t responses_sent_ = 0;
};

// --- scenario plumbing ----------------------------------------------------

struct AttackInstance {
    AttackKind kind;
    Time start = 0;
    std::string ground_truth_id;
    // Kind-specific parameters; unused fields are ignored by each launcher.
    uint16_t target_id = 0;
    Bytes payload;
    double rate_fps = 0.0;
    Time duration = 0;
    Segment segment = Segment::Critical;
    Time added_rtt = 0;      // rf_relay
    Time capture_at = 0;     // rf_replay: when the victim presses the fob
    uint32_t device_id = 0;  // obd_reprogram
    double peak_g = 3.0;     // glass_break
    int attempts = 0;        // fob_spoof
    Time interval = 0;       // fob_spoof
};

}  // namespace agx
