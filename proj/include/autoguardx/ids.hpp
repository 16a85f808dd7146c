#pragma once

// Streaming intrusion detection over the vehicle's CAN and sensor feeds.
//
// The detector learns a behavioural baseline during a warm-up window (known
// frame ids, per-id inter-arrival statistics, per-id payload byte ranges, a
// vibration noise floor) and then freezes it.  After warm-up every observation
// runs through a fixed check order: allowlist, inter-arrival z-score, window
// rate, payload range, vibration threshold, geofence.  Inspection cost is
// modeled explicitly: each fully inspected frame charges a fixed number of
// microseconds against a per-window budget, and frames arriving after the
// budget is spent only get the cheap id/rate checks.
//
// The Enforcer turns alert records into blocking-action records (frame drops,
// rate limiting, OBD session freezes) so that every mitigation leaves an
// audit trail.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "autoguardx/bytes.hpp"
#include "autoguardx/can.hpp"
#include "autoguardx/events.hpp"
#include "autoguardx/kernel.hpp"
#include "autoguardx/sensors.hpp"

namespace agx {

// --- geofence -------------------------------------------------------------

struct Geofence {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double radius_m = 0.0;
};

// Great-circle distance between two WGS84 points, spherical earth model.
inline double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusM = 6'371'000.0;
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlam = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

// --- configuration --------------------------------------------------------

struct IdsConfig {
    double alpha = 0.05;              // EWMA decay for all learned statistics
    double z_max = 6.0;               // inter-arrival z-score threshold
    double flood_rate_fps = 3'000.0;  // bus-wide frame-rate ceiling
    double vib_sigma_factor = 10.0;   // vibration threshold in baseline sigmas
    double sigma_floor_us = 100.0;    // lower bound on timing sigma
    int payload_margin = 2;           // slack added around learned byte ranges
    // Critical-segment ids above this carry authenticator payloads (freshness
    // counter + truncated MAC) whose bytes are unpredictable by design, so
    // the byte-range check is skipped for them.  Timing, rate, and allowlist
    // checks still apply.  Application ids sit at or below this value; their
    // authenticator companions one 0x400 stride higher.
    uint16_t payload_exempt_above = 0x3FF;
    Time flood_window = 100'000;      // rate-accounting window
    Time inspect_window = 10'000;     // budget-accounting window
    Time inspect_cost = 80;           // modeled cost of one full inspection
    Time min_warmup = 60 * kMicrosPerSecond;
    std::optional<Geofence> fence;

    // Bounds for adaptive threshold steps.
    double z_max_floor = 1.0, z_max_cap = 12.0;
    double vib_factor_floor = 2.0, vib_factor_cap = 20.0;
};

// Caps the number of distinct unknown-id alerts raised in one rate window so
// that random-id floods cannot turn into alert storms.
constexpr int kMaxUnknownAlertsPerWindow = 16;

// --- learned state --------------------------------------------------------

struct IdStats {
    Time last_arrival = 0;
    bool has_last = false;
    double mu = 0.0;   // EWMA mean of inter-arrival (µs)
    double var = 0.0;  // EWMA variance of inter-arrival (µs²)
    uint64_t intervals = 0;
    uint8_t byte_lo[kMaxDlc];
    uint8_t byte_hi[kMaxDlc];
    uint8_t min_len = 0xFF;
    uint8_t max_len = 0;
    Time last_timing_alert = 0;
    bool had_timing_alert = false;

    IdStats() {
        std::fill(std::begin(byte_lo), std::end(byte_lo), uint8_t{0xFF});
        std::fill(std::begin(byte_hi), std::end(byte_hi), uint8_t{0x00});
    }
};

struct DetectorState {
    IdsConfig cfg;
    std::unordered_map<uint16_t, IdStats> per_id;
    double vib_mean = 0.0;
    double vib_var = 0.0;
    uint64_t vib_samples = 0;
    bool warmed = false;
    Time warmup_began = 0;
    Time warmup_ended = 0;

    bool knows(uint16_t id) const { return per_id.count(id) != 0; }
    double vib_threshold() const {
        return vib_mean + cfg.vib_sigma_factor * std::sqrt(vib_var);
    }
};

// Labels accepted by Detector::adaptive_update.  A false positive widens the
// offending threshold; a confirmed miss tightens it.
enum class AdaptiveLabel {
    TimingFalsePositive,
    TimingMiss,
    VibrationFalsePositive,
    VibrationMiss,
};

inline AdaptiveLabel parse_adaptive_label(const std::string& s) {
    if (s == "fp:timing") return AdaptiveLabel::TimingFalsePositive;
    if (s == "miss:timing") return AdaptiveLabel::TimingMiss;
    if (s == "fp:vibration") return AdaptiveLabel::VibrationFalsePositive;
    if (s == "miss:vibration") return AdaptiveLabel::VibrationMiss;
    throw std::invalid_argument("unknown adaptive label: " + s);
}

// --- detector -------------------------------------------------------------

class Detector {
public:
    Detector(IdsConfig cfg, EventSink sink)
        : sink_(std::move(sink)) {
        if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0)
            throw std::invalid_argument("ids: alpha must lie in (0, 1)");
        if (cfg.z_max <= 0.0 || cfg.flood_rate_fps <= 0.0 || cfg.vib_sigma_factor <= 0.0)
            throw std::invalid_argument("ids: thresholds must be positive");
        state_.cfg = cfg;
        flood_limit_ = static_cast<uint64_t>(
            cfg.flood_rate_fps * static_cast<double>(cfg.flood_window) / 1e6);
        budget_per_window_ = state_.cfg.inspect_window;
    }

    // Resumes detection from a previously warmed baseline (e.g. to replay a
    // trace under adjusted thresholds).
    Detector(DetectorState st, EventSink sink)
        : state_(std::move(st)), sink_(std::move(sink)) {
        if (!state_.warmed)
            throw std::invalid_argument("ids: restored state must be warmed");
        flood_limit_ = static_cast<uint64_t>(
            state_.cfg.flood_rate_fps * static_cast<double>(state_.cfg.flood_window) / 1e6);
        budget_per_window_ = state_.cfg.inspect_window;
    }

    void begin_warmup(Time at) {
        state_.warmup_began = at;
        learning_ = true;
    }

    // Freezes the baseline.  The observed window must span at least the
    // configured minimum (60 virtual seconds by default).
    void end_warmup(Time at) {
        if (at < state_.warmup_began ||
            at - state_.warmup_began < state_.cfg.min_warmup)
            throw std::runtime_error("ids: warm-up trace shorter than required minimum");
        if (state_.per_id.empty())
            throw std::runtime_error("ids: warm-up trace contained no frames");
        learning_ = false;
        state_.warmed = true;
        state_.warmup_ended = at;
    }

    bool warmed() const { return state_.warmed; }
    const DetectorState& state() const { return state_; }
    double z_max() const { return state_.cfg.z_max; }
    double vib_sigma_factor() const { return state_.cfg.vib_sigma_factor; }

    uint64_t frames_observed() const { return frames_observed_; }
    uint64_t fully_inspected() const { return fully_inspected_; }
    double inspection_rate() const {
        return frames_observed_ == 0
                   ? 1.0
                   : static_cast<double>(fully_inspected_) / static_cast<double>(frames_observed_);
    }

    void observe_frame(const CanFrame& f) {
        ++frames_observed_;
        roll_windows(f.timestamp);
        const bool full = charge_budget();

        if (learning_) {
            if (full) learn_frame(f);
            else track_arrival_only(f);
            return;
        }
        if (!state_.warmed) return;  // between construction and begin_warmup: ignore

        // Check order per frame: allowlist, inter-arrival z-score, window
        // rate, payload range.  The id lookup and rate counter are the cheap
        // checks that still run when the inspection budget is spent.
        auto it = state_.per_id.find(f.id);
        if (it == state_.per_id.end()) {
            // Unknown id: alert once per id per window, silenced while a flood
            // alert is active for the window and capped to keep random-id
            // storms from flooding the log themselves.
            if (!flood_alerted_ &&
                static_cast<int>(unknown_this_window_.size()) < kMaxUnknownAlertsPerWindow &&
                unknown_this_window_.insert(f.id).second) {
                char ev[48];
                std::snprintf(ev, sizeof ev, "seg=%s;dlc=%u",
                              segment_name(f.segment), static_cast<unsigned>(f.dlc()));
                emit(EventClass::UnknownId, Severity::Warning, f.timestamp,
                     frame_subject(f.id), ev);
            }
            count_toward_rate(f.timestamp);
            return;
        }

        IdStats& s = it->second;
        if (!full) {
            // Budget exhausted: keep the arrival clock honest but skip the
            // model checks.
            s.last_arrival = f.timestamp;
            s.has_last = true;
            count_toward_rate(f.timestamp);
            return;
        }

        if (s.has_last && s.intervals >= 2) {
            const double dt = static_cast<double>(f.timestamp - s.last_arrival);
            const double sigma =
                std::max(std::sqrt(s.var), state_.cfg.sigma_floor_us);
            const double z = std::fabs(dt - s.mu) / sigma;
            if (z > state_.cfg.z_max) {
                // Trend flag: a repeat anomaly on the same id within a second
                // is escalated from Info to Warning.
                const bool trending =
                    s.had_timing_alert && f.timestamp - s.last_timing_alert <= kMicrosPerSecond;
                s.had_timing_alert = true;
                s.last_timing_alert = f.timestamp;
                char ev[96];
                std::snprintf(ev, sizeof ev, "seg=%s;z=%.2f;dt_us=%.0f;mu_us=%.0f",
                              segment_name(f.segment), z, dt, s.mu);
                emit(EventClass::TimingAnomaly,
                     trending ? Severity::Warning : Severity::Info, f.timestamp,
                     frame_subject(f.id), ev);
            }
        }
        s.last_arrival = f.timestamp;
        s.has_last = true;

        count_toward_rate(f.timestamp);

        if (payload_out_of_range(s, f)) {
            char ev[48];
            std::snprintf(ev, sizeof ev, "seg=%s;payload;dlc=%u",
                          segment_name(f.segment), static_cast<unsigned>(f.dlc()));
            emit(EventClass::TimingAnomaly, Severity::Warning, f.timestamp,
                 frame_subject(f.id), ev);
        }
    }

    void observe_sample(const SensorSample& sm) {
        if (sm.kind == SensorKind::Vibration) {
            if (learning_) {
                learn_vibration(sm.a);
                return;
            }
            if (!state_.warmed || state_.vib_samples == 0) return;
            const double threshold = state_.vib_threshold();
            if (sm.a > threshold &&
                (!had_vib_alert_ || sm.timestamp - last_vib_alert_ > kMicrosPerSecond)) {
                had_vib_alert_ = true;
                last_vib_alert_ = sm.timestamp;
                char ev[64];
                std::snprintf(ev, sizeof ev, "value_g=%.3f;threshold_g=%.3f", sm.a, threshold);
                emit(EventClass::VibrationSpike, Severity::Critical, sm.timestamp,
                     "sensor:vibration", ev);
            }
            return;
        }
        if (sm.kind == SensorKind::Gps) {
            if (learning_ || !state_.warmed) return;
            if (auto alert = geofence_check(sm)) emit_record(*alert);
        }
    }

    // Edge-triggered fence check: one alert per excursion, re-armed when the
    // vehicle comes back inside.
    std::optional<EventRecord> geofence_check(const SensorSample& sm) {
        if (!state_.cfg.fence) return std::nullopt;
        const Geofence& fence = *state_.cfg.fence;
        const double d = haversine_m(sm.a, sm.b, fence.lat_deg, fence.lon_deg);
        const bool outside = d > fence.radius_m;
        if (!outside) {
            fence_breached_ = false;
            return std::nullopt;
        }
        if (fence_breached_) return std::nullopt;
        fence_breached_ = true;
        char ev[96];
        std::snprintf(ev, sizeof ev, "distance_m=%.1f;radius_m=%.1f;lat=%.7f;lon=%.7f",
                      d, fence.radius_m, sm.a, sm.b);
        EventRecord rec;
        rec.cls = EventClass::GeofenceBreach;
        rec.severity = Severity::Warning;
        rec.time = sm.timestamp;
        rec.subject = "sensor:gps";
        rec.evidence = Bytes(ev, ev + std::char_traits<char>::length(ev));
        return rec;
    }

    // Supervised threshold adjustment from a confirmed incident label.  The
    // step sizes are fixed so a replayed label sequence always lands on the
    // same thresholds.
    void adaptive_update(AdaptiveLabel label, Time now) {
        IdsConfig& cfg = state_.cfg;
        const char* what = nullptr;
        double value = 0.0;
        switch (label) {
            case AdaptiveLabel::TimingFalsePositive:
                cfg.z_max = std::min(cfg.z_max + 0.5, cfg.z_max_cap);
                what = "detector:timing";
                value = cfg.z_max;
                break;
            case AdaptiveLabel::TimingMiss:
                cfg.z_max = std::max(cfg.z_max - 0.5, cfg.z_max_floor);
                what = "detector:timing";
                value = cfg.z_max;
                break;
            case AdaptiveLabel::VibrationFalsePositive:
                cfg.vib_sigma_factor = std::min(cfg.vib_sigma_factor + 1.0, cfg.vib_factor_cap);
                what = "detector:vibration";
                value = cfg.vib_sigma_factor;
                break;
            case AdaptiveLabel::VibrationMiss:
                cfg.vib_sigma_factor = std::max(cfg.vib_sigma_factor - 1.0, cfg.vib_factor_floor);
                what = "detector:vibration";
                value = cfg.vib_sigma_factor;
                break;
        }
        char ev[48];
        std::snprintf(ev, sizeof ev, "threshold=%.1f", value);
        emit(EventClass::AdaptiveUpdate, Severity::Info, now, what, ev);
    }

    void adaptive_update(const std::string& label, Time now) {
        adaptive_update(parse_adaptive_label(label), now);
    }

private:
    void learn_frame(const CanFrame& f) {
        IdStats& s = state_.per_id[f.id];
        if (s.has_last) {
            const double dt = static_cast<double>(f.timestamp - s.last_arrival);
            if (s.intervals == 0) {
                s.mu = dt;
                s.var = 0.0;
            } else {
                const double diff = dt - s.mu;
                s.mu += state_.cfg.alpha * diff;
                s.var = (1.0 - state_.cfg.alpha) * (s.var + state_.cfg.alpha * diff * diff);
            }
            ++s.intervals;
        }
        s.last_arrival = f.timestamp;
        s.has_last = true;
        const uint8_t n = f.dlc();
        s.min_len = std::min(s.min_len, n);
        s.max_len = std::max(s.max_len, n);
        for (uint8_t i = 0; i < n; ++i) {
            s.byte_lo[i] = std::min(s.byte_lo[i], f.payload[i]);
            s.byte_hi[i] = std::max(s.byte_hi[i], f.payload[i]);
        }
    }

    void track_arrival_only(const CanFrame& f) {
        IdStats& s = state_.per_id[f.id];
        s.last_arrival = f.timestamp;
        s.has_last = true;
    }

    void learn_vibration(double g) {
        if (state_.vib_samples == 0) {
            state_.vib_mean = g;
            state_.vib_var = 0.0;
        } else {
            const double diff = g - state_.vib_mean;
            state_.vib_mean += state_.cfg.alpha * diff;
            state_.vib_var =
                (1.0 - state_.cfg.alpha) * (state_.vib_var + state_.cfg.alpha * diff * diff);
        }
        ++state_.vib_samples;
    }

    bool payload_out_of_range(const IdStats& s, const CanFrame& f) const {
        if (f.segment == Segment::Critical && f.id > state_.cfg.payload_exempt_above)
            return false;
        const int margin = state_.cfg.payload_margin;
        const uint8_t n = f.dlc();
        if (n < s.min_len || n > s.max_len) return true;
        for (uint8_t i = 0; i < n; ++i) {
            const int lo = std::max(0, static_cast<int>(s.byte_lo[i]) - margin);
            const int hi = std::min(255, static_cast<int>(s.byte_hi[i]) + margin);
            const int v = f.payload[i];
            if (v < lo || v > hi) return true;
        }
        return false;
    }

    void count_toward_rate(Time t) {
        ++window_frames_;
        if (!flood_alerted_ && window_frames_ > flood_limit_) {
            flood_alerted_ = true;
            char ev[64];
            std::snprintf(ev, sizeof ev, "window_frames=%llu;limit=%llu",
                          static_cast<unsigned long long>(window_frames_),
                          static_cast<unsigned long long>(flood_limit_));
            emit(EventClass::Flood, Severity::Critical, t, "bus", ev);
        }
    }

    void roll_windows(Time t) {
        const Time rate_window = t - (t % state_.cfg.flood_window);
        if (!have_rate_window_ || rate_window != rate_window_start_) {
            have_rate_window_ = true;
            rate_window_start_ = rate_window;
            window_frames_ = 0;
            flood_alerted_ = false;
            unknown_this_window_.clear();
        }
        const Time budget_window = t - (t % state_.cfg.inspect_window);
        if (!have_budget_window_ || budget_window != budget_window_start_) {
            have_budget_window_ = true;
            budget_window_start_ = budget_window;
            budget_spent_ = 0;
        }
    }

    bool charge_budget() {
        if (budget_spent_ + state_.cfg.inspect_cost > budget_per_window_) return false;
        budget_spent_ += state_.cfg.inspect_cost;
        ++fully_inspected_;
        return true;
    }

    void emit(EventClass cls, Severity sev, Time t, const std::string& subject,
              const char* evidence) {
        EventRecord rec;
        rec.cls = cls;
        rec.severity = sev;
        rec.time = t;
        rec.subject = subject;
        rec.evidence = Bytes(evidence, evidence + std::char_traits<char>::length(evidence));
        emit_record(rec);
    }

    void emit_record(const EventRecord& rec) {
        if (sink_) sink_(rec);
    }

    DetectorState state_;
    EventSink sink_;
    bool learning_ = false;

    uint64_t flood_limit_ = 0;
    Time budget_per_window_ = 0;

    bool have_rate_window_ = false;
    Time rate_window_start_ = 0;
    uint64_t window_frames_ = 0;
    bool flood_alerted_ = false;
    std::unordered_set<uint16_t> unknown_this_window_;

    bool have_budget_window_ = false;
    Time budget_window_start_ = 0;
    Time budget_spent_ = 0;

    bool had_vib_alert_ = false;
    Time last_vib_alert_ = 0;
    bool fence_breached_ = false;

    uint64_t frames_observed_ = 0;
    uint64_t fully_inspected_ = 0;
};

// Builds a frozen baseline from a recorded benign trace.  `duration` is the
// length of the observation window the trace came from, which may exceed the
// last timestamp in it.
inline DetectorState warm_up(const std::vector<CanFrame>& frames,
                             const std::vector<SensorSample>& samples,
                             Time duration, IdsConfig cfg = {}) {
    DetectorState out;
    Detector det(cfg, nullptr);
    det.begin_warmup(0);
    // Frames and samples are merged in timestamp order so EWMA updates see
    // the stream exactly as live observation would.
    size_t fi = 0, si = 0;
    while (fi < frames.size() || si < samples.size()) {
        const bool frame_next =
            si >= samples.size() ||
            (fi < frames.size() && frames[fi].timestamp <= samples[si].timestamp);
        if (frame_next) det.observe_frame(frames[fi++]);
        else det.observe_sample(samples[si++]);
    }
    det.end_warmup(duration);
    return det.state();
}

// --- enforcement ----------------------------------------------------------

// Maps alert records to blocking actions and records each action taken.
// Frame-level drops for failed authentication are physically performed by the
// authentication gate; this class owns the audit record and the responses
// that need a decision: frame drops for unknown critical-segment ids, rate
// limiting on flood, and freezing the diagnostic port on intrusion.
class Enforcer {
public:
    using FreezeFn = std::function<void()>;

    Enforcer(EventSink actions, FreezeFn freeze_obd = nullptr)
        : actions_(std::move(actions)), freeze_obd_(std::move(freeze_obd)) {}

    void on_alert(const EventRecord& a) {
        switch (a.cls) {
            case EventClass::UnknownId:
            case EventClass::AuthFailure:
                // Only frames are droppable; fob-level failures have no frame.
                if (a.subject.rfind("frame:", 0) == 0 && critical_evidence(a))
                    act(EventClass::FrameDropped, a);
                break;
            case EventClass::Flood:
                act(EventClass::RateLimited, a);
                break;
            case EventClass::ObdIntrusion:
                if (!froze_ && freeze_obd_) {
                    froze_ = true;
                    freeze_obd_();
                }
                break;
            default:
                break;
        }
    }

    uint64_t actions_taken() const { return actions_taken_; }
    bool froze_obd() const { return froze_; }

private:
    static bool critical_evidence(const EventRecord& a) {
        static const std::string kTag = "seg=critical";
        const std::string ev(a.evidence.begin(), a.evidence.end());
        return ev.compare(0, kTag.size(), kTag) == 0;
    }

    void act(EventClass cls, const EventRecord& cause) {
        ++actions_taken_;
        if (!actions_) return;
        EventRecord rec;
        rec.cls = cls;
        rec.severity = Severity::Warning;
        rec.time = cause.time;
        rec.subject = cause.subject;
        rec.evidence = Bytes{'e', 'n', 'f', 'o', 'r', 'c', 'e', 'd'};
        actions_(rec);
    }

    EventSink actions_;
    FreezeFn freeze_obd_;
    bool froze_ = false;
    uint64_t actions_taken_ = 0;
};

}  // namespace agx
