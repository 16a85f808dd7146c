#pragma once
// Shared vocabulary for everything the defense reports: detector alerts,
// authentication rejections, and enforcement actions all flow through one
// EventRecord stream that feeds both scoring and the forensic log.

#include <functional>
#include <string>

#include "autoguardx/bytes.hpp"
#include "autoguardx/kernel.hpp"

namespace agx {

enum class Severity : uint8_t { Info, Warning, Critical };

enum class EventClass : uint8_t {
    // Detector alert kinds.
    UnknownId,
    TimingAnomaly,
    Flood,
    AuthFailure,
    VibrationSpike,
    GeofenceBreach,
    RelaySuspect,
    ObdIntrusion,
    // Enforcement / protocol outcomes.
    FrameDropped,
    RateLimited,
    SessionFrozen,
    AdmissionDenied,
    OtaRejected,
    UnlockAccepted,
    AdaptiveUpdate,
};

inline bool is_alert(EventClass c) { return static_cast<uint8_t>(c) <= static_cast<uint8_t>(EventClass::ObdIntrusion); }

inline const char* event_class_name(EventClass c) {
    switch (c) {
        case EventClass::UnknownId: return "unknown_id";
        case EventClass::TimingAnomaly: return "timing_anomaly";
        case EventClass::Flood: return "flood";
        case EventClass::AuthFailure: return "auth_failure";
        case EventClass::VibrationSpike: return "vibration_spike";
        case EventClass::GeofenceBreach: return "geofence_breach";
        case EventClass::RelaySuspect: return "relay_suspect";
        case EventClass::ObdIntrusion: return "obd_intrusion";
        case EventClass::FrameDropped: return "frame_dropped";
        case EventClass::RateLimited: return "rate_limited";
        case EventClass::SessionFrozen: return "session_frozen";
        case EventClass::AdmissionDenied: return "admission_denied";
        case EventClass::OtaRejected: return "ota_rejected";
        case EventClass::UnlockAccepted: return "unlock_accepted";
        case EventClass::AdaptiveUpdate: return "adaptive_update";
    }
    return "?";
}

inline const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Critical: return "critical";
    }
    return "?";
}

struct EventRecord {
    EventClass cls;
    Severity severity;
    Time time;
    std::string subject;  // "frame:0x1a0" | "device:0xc0ffee" | "fob:0x1" | "sensor:vibration"
    Bytes evidence;
};

using EventSink = std::function<void(const EventRecord&)>;

inline std::string frame_subject(uint16_t id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "frame:0x%03x", id);
    return buf;
}

inline std::string device_subject(uint32_t device_id) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "device:0x%08x", device_id);
    return buf;
}

inline std::string fob_subject(uint32_t fob_id) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "fob:0x%08x", fob_id);
    return buf;
}

}  // namespace agx
