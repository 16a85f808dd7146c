#pragma once
// OBD port authentication. A connecting device gets a 16-byte nonce and must
// answer HMAC-SHA256(device_key, nonce ‖ device_id)[:16]. Key-programming
// commands are honored only inside an authenticated session; every rejection
// is reported with the device id and timestamp. The factory profile skips
// all of this — any device may program keys (that is the measured baseline).

#include <optional>
#include <unordered_map>

#include "autoguardx/crypto.hpp"
#include "autoguardx/events.hpp"
#include "autoguardx/rng.hpp"

namespace agx {

enum class ObdState : uint8_t { ChallengeSent, Authenticated, Rejected, Frozen };

enum class ObdReject : uint8_t { UnknownDevice, BadResponse, NotAuthenticated, PortFrozen };

inline const char* obd_reject_name(ObdReject r) {
    switch (r) {
        case ObdReject::UnknownDevice: return "unknown_device";
        case ObdReject::BadResponse: return "bad_response";
        case ObdReject::NotAuthenticated: return "not_authenticated";
        case ObdReject::PortFrozen: return "port_frozen";
    }
    return "?";
}

// Response a legitimate device computes for a challenge.
inline std::array<uint8_t, 16> obd_response(const Bytes& device_key,
                                            std::span<const uint8_t> nonce, uint32_t device_id) {
    Bytes msg(nonce.begin(), nonce.end());
    put_be32(msg, device_id);
    auto full = hmac_sha256(device_key, msg);
    std::array<uint8_t, 16> out;
    std::copy(full.begin(), full.begin() + 16, out.begin());
    return out;
}

struct ObdSession {
    uint64_t session_id;
    uint32_t device_id;
    std::array<uint8_t, 16> nonce;
    ObdState state;
};

class ObdPort {
public:
    ObdPort(Kernel& k, std::unordered_map<uint32_t, Bytes> device_keys, bool enforce, Rng nonce_rng,
            EventSink events)
        : kernel_(k),
          device_keys_(std::move(device_keys)),
          enforce_(enforce),
          rng_(nonce_rng),
          events_(std::move(events)) {}

    // Plug in: opens a session and returns the challenge nonce.
    ObdSession& connect(uint32_t device_id) {
        uint64_t sid = next_session_++;
        auto [it, ok] =
            sessions_.emplace(sid, ObdSession{sid, device_id, rng_.bytes<16>(), ObdState::ChallengeSent});
        return it->second;
    }

    enum class AuthResult : uint8_t { Authenticated, Rejected };

    AuthResult respond(uint64_t session_id, std::span<const uint8_t> response) {
        ObdSession& s = sessions_.at(session_id);
        if (s.state != ObdState::ChallengeSent) return AuthResult::Rejected;
        if (frozen_) return reject(s, ObdReject::PortFrozen);
        auto key = device_keys_.find(s.device_id);
        if (key == device_keys_.end()) return reject(s, ObdReject::UnknownDevice);
        auto expect = obd_response(key->second, s.nonce, s.device_id);
        if (response.size() != expect.size() || !ct_equal(expect, response))
            return reject(s, ObdReject::BadResponse);
        s.state = ObdState::Authenticated;
        return AuthResult::Authenticated;
    }

    // Key-programming command (what the attack ultimately wants). Returns
    // true if the port performed it.
    bool program_key(uint64_t session_id, uint32_t new_fob_id) {
        ObdSession& s = sessions_.at(session_id);
        if (!enforce_) {  // factory port: no auth gate at all
            programmed_fobs_.push_back(new_fob_id);
            return true;
        }
        if (s.state != ObdState::Authenticated) {
            report(s.device_id, ObdReject::NotAuthenticated);
            return false;
        }
        programmed_fobs_.push_back(new_fob_id);
        return true;
    }

    // Enforcement hook: refuse every later auth attempt on this port.
    void freeze() {
        if (frozen_) return;
        frozen_ = true;
        if (events_)
            events_({EventClass::SessionFrozen, Severity::Warning, kernel_.now(), "device:port", {}});
    }

    bool frozen() const { return frozen_; }
    bool enforcing() const { return enforce_; }
    const std::vector<uint32_t>& programmed_fobs() const { return programmed_fobs_; }
    const ObdSession& session(uint64_t sid) const { return sessions_.at(sid); }

private:
    AuthResult reject(ObdSession& s, ObdReject why) {
        s.state = ObdState::Rejected;
        report(s.device_id, why);
        return AuthResult::Rejected;
    }

    void report(uint32_t device_id, ObdReject why) {
        if (!events_) return;
        const char* name = obd_reject_name(why);
        events_({EventClass::ObdIntrusion, Severity::Critical, kernel_.now(),
                 device_subject(device_id), Bytes(name, name + strlen(name))});
    }

    Kernel& kernel_;
    std::unordered_map<uint32_t, Bytes> device_keys_;
    bool enforce_;
    bool frozen_ = false;
    Rng rng_;
    EventSink events_;
    std::unordered_map<uint64_t, ObdSession> sessions_;
    uint64_t next_session_ = 1;
    std::vector<uint32_t> programmed_fobs_;
};

}  // namespace agx
