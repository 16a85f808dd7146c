#pragma once

// Joins the alert stream against the scripted attack schedule and reduces the
// run to the headline metrics: per-attack detection latency, detection
// accuracy, false-positive rate, and inspection rate.  Scoring is a pure
// function — same alerts, same schedule, same counters, same report.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autoguardx/attacks.hpp"
#include "autoguardx/events.hpp"
#include "autoguardx/kernel.hpp"

namespace agx {

constexpr Time kMatchWindow = 5 * kMicrosPerSecond;

// Which alert classes count as detection of which attack kind.  An attack is
// allowed several signatures because defenses observe it at different layers
// (e.g. an injected frame fails authentication and skews timing).
inline bool alert_matches_attack(AttackKind kind, EventClass cls) {
    switch (kind) {
        case AttackKind::RfReplay:
            return cls == EventClass::AuthFailure;
        case AttackKind::RfRelay:
            return cls == EventClass::RelaySuspect || cls == EventClass::AuthFailure;
        case AttackKind::CanInjection:
            return cls == EventClass::AuthFailure || cls == EventClass::TimingAnomaly ||
                   cls == EventClass::UnknownId;
        case AttackKind::CanFlood:
            return cls == EventClass::Flood || cls == EventClass::UnknownId;
        case AttackKind::ObdReprogram:
            return cls == EventClass::ObdIntrusion;
        case AttackKind::UsbExfiltration:
            return cls == EventClass::ObdIntrusion;
        case AttackKind::GlassBreak:
            return cls == EventClass::VibrationSpike;
        case AttackKind::FobSpoof:
            return cls == EventClass::AuthFailure;
    }
    return false;
}

struct ScheduledAttack {
    std::string ground_truth_id;
    AttackKind kind;
    Time start = 0;
    bool blocked = false;  // filled by the harness from end-state checks
};

struct AttackScore {
    std::string ground_truth_id;
    AttackKind kind;
    Time start = 0;
    bool detected = false;
    Time latency = 0;  // first matching alert − start; valid when detected
    bool blocked = false;
};

struct ScoreSummary {
    std::vector<AttackScore> attacks;
    uint64_t alerts_total = 0;
    uint64_t alerts_matched = 0;
    uint64_t benign_frames = 0;
    uint64_t frames_total = 0;
    uint64_t fully_inspected = 0;
    double accuracy = 1.0;         // detected ÷ scheduled (1.0 when none scheduled)
    double false_positive_rate = 0.0;  // unmatched alerts ÷ benign frames
    double inspection_rate = 1.0;
    Time max_latency = 0;          // over detected attacks
    double mean_latency_us = 0.0;

    uint64_t detected_count() const {
        uint64_t n = 0;
        for (const auto& a : attacks) n += a.detected ? 1 : 0;
        return n;
    }
};

// An alert is credited to an attack when its class fits the attack kind and
// it fires inside the match window after the attack starts.  Alerts credited
// to no attack at all are the false positives.
inline ScoreSummary score(const std::vector<EventRecord>& events,
                          const std::vector<ScheduledAttack>& schedule,
                          uint64_t benign_frames, uint64_t frames_total,
                          uint64_t fully_inspected, Time match_window = kMatchWindow) {
    ScoreSummary out;
    out.benign_frames = benign_frames;
    out.frames_total = frames_total;
    out.fully_inspected = fully_inspected;

    out.attacks.reserve(schedule.size());
    for (const auto& s : schedule)
        out.attacks.push_back({s.ground_truth_id, s.kind, s.start, false, 0, s.blocked});

    for (const auto& ev : events) {
        if (!is_alert(ev.cls)) continue;
        ++out.alerts_total;
        bool matched = false;
        for (auto& a : out.attacks) {
            if (ev.time < a.start || ev.time - a.start > match_window) continue;
            if (!alert_matches_attack(a.kind, ev.cls)) continue;
            matched = true;
            if (!a.detected || ev.time - a.start < a.latency) {
                a.detected = true;
                a.latency = ev.time - a.start;
            }
        }
        if (matched) ++out.alerts_matched;
    }

    uint64_t detected = 0;
    double latency_sum = 0.0;
    for (const auto& a : out.attacks) {
        if (!a.detected) continue;
        ++detected;
        latency_sum += static_cast<double>(a.latency);
        out.max_latency = std::max(out.max_latency, a.latency);
    }
    if (!out.attacks.empty())
        out.accuracy = static_cast<double>(detected) / static_cast<double>(out.attacks.size());
    if (detected > 0) out.mean_latency_us = latency_sum / static_cast<double>(detected);
    if (benign_frames > 0)
        out.false_positive_rate =
            static_cast<double>(out.alerts_total - out.alerts_matched) /
            static_cast<double>(benign_frames);
    if (frames_total > 0)
        out.inspection_rate =
            static_cast<double>(fully_inspected) / static_cast<double>(frames_total);
    return out;
}

}  // namespace agx
