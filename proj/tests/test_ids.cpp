// Detection layer: baseline learning, the six check stages, the modeled
// inspection budget, enforcement translation, and adaptive threshold steps.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "autoguardx/ids.hpp"
#include "autoguardx/rng.hpp"

using namespace agx;

namespace {

struct SinkRig {
    std::vector<EventRecord> events;

    EventSink sink() {
        return [this](const EventRecord& e) { events.push_back(e); };
    }

    size_t count(EventClass c) const {
        return static_cast<size_t>(
            std::count_if(events.begin(), events.end(),
                          [c](const EventRecord& e) { return e.cls == c; }));
    }

    const EventRecord* first(EventClass c) const {
        for (const auto& e : events)
            if (e.cls == c) return &e;
        return nullptr;
    }
};

CanFrame frame_at(uint16_t id, Time t, Bytes payload = {0x00},
                  Segment seg = Segment::Critical) {
    CanFrame f;
    f.id = id;
    f.payload = std::move(payload);
    f.timestamp = t;
    f.segment = seg;
    f.source = "test";
    return f;
}

// Streams a periodic frame schedule for `id` into `det` over [0, duration).
// Returns the timestamp of the last frame sent.
Time feed_periodic(Detector& det, uint16_t id, Time period, Time jitter_amp,
                   Time duration, uint64_t seed, const Bytes& payload) {
    Rng rng = Rng::for_label(seed, "ids-feed");
    Time t = 0, last = 0;
    while (t < duration) {
        Time at = t;
        if (jitter_amp > 0)
            at += static_cast<Time>(
                rng.next_in(-static_cast<int64_t>(jitter_amp),
                            static_cast<int64_t>(jitter_amp)) +
                static_cast<int64_t>(jitter_amp));
        det.observe_frame(frame_at(id, at, payload));
        last = at;
        t += period;
    }
    return last;
}

void feed_vibration(Detector& det, double sigma, Time duration, uint64_t seed) {
    Rng rng = Rng::for_label(seed, "ids-vib");
    for (Time t = 0; t < duration; t += 10'000) {
        double v = std::min(std::abs(rng.next_gaussian()), 3.0) * sigma;
        det.observe_sample({SensorKind::Vibration, t, v, 0});
    }
}

constexpr Time kMinute = 60 * kMicrosPerSecond;

// A detector warmed on one zero-jitter 10 ms stream with a constant payload.
struct WarmRig : SinkRig {
    Detector det;

    explicit WarmRig(IdsConfig cfg = {}) : det(cfg, sink()) {
        det.begin_warmup(0);
        feed_periodic(det, 0x100, 10'000, 0, kMinute, 1, {0x10, 0x20});
        feed_vibration(det, 0.05, kMinute, 1);
        det.end_warmup(kMinute);
        events.clear();
    }
};

}  // namespace

TEST_CASE("warm-up learns the id allowlist and timing means") {
    SinkRig rig;
    Detector det(IdsConfig{}, rig.sink());
    det.begin_warmup(0);
    feed_periodic(det, 0x100, 10'000, 0, kMinute, 1, {0xAA});
    feed_periodic(det, 0x200, 20'000, 0, kMinute, 2, {0xBB});
    det.end_warmup(kMinute);

    const DetectorState& st = det.state();
    REQUIRE(st.warmed);
    REQUIRE(st.per_id.size() == 2);
    REQUIRE(st.knows(0x100));
    REQUIRE(st.knows(0x200));
    REQUIRE_FALSE(st.knows(0x300));

    // Constant spacing: the EWMA mean converges to the period exactly.
    CHECK(st.per_id.at(0x100).mu == Catch::Approx(10'000.0).epsilon(0.01));
    CHECK(st.per_id.at(0x200).mu == Catch::Approx(20'000.0).epsilon(0.01));
    CHECK(rig.events.empty());  // learning never alerts
}

TEST_CASE("warm-up shorter than a minute is refused") {
    SinkRig rig;
    Detector det(IdsConfig{}, rig.sink());
    det.begin_warmup(0);
    feed_periodic(det, 0x100, 10'000, 0, 59 * kMicrosPerSecond, 1, {0xAA});
    CHECK_THROWS_AS(det.end_warmup(59 * kMicrosPerSecond), std::runtime_error);
}

TEST_CASE("warm-up with no frames is refused") {
    Detector det(IdsConfig{}, nullptr);
    det.begin_warmup(0);
    CHECK_THROWS_AS(det.end_warmup(2 * kMinute), std::runtime_error);
}

TEST_CASE("ids config validation") {
    IdsConfig bad;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(Detector(bad, nullptr), std::invalid_argument);
    bad = {};
    bad.z_max = 0.0;
    CHECK_THROWS_AS(Detector(bad, nullptr), std::invalid_argument);
    DetectorState cold;
    CHECK_THROWS_AS(Detector(cold, nullptr), std::invalid_argument);
}

TEST_CASE("trace warm_up helper builds the same baseline") {
    std::vector<CanFrame> frames;
    for (Time t = 0; t < kMinute; t += 10'000) frames.push_back(frame_at(0x100, t, {0xAA}));
    std::vector<SensorSample> samples;
    Rng rng = Rng::for_label(9, "vib");
    for (Time t = 0; t < kMinute; t += 10'000)
        samples.push_back({SensorKind::Vibration, t, std::min(std::abs(rng.next_gaussian()), 3.0) * 0.05, 0});

    DetectorState st = warm_up(frames, samples, kMinute);
    CHECK(st.per_id.size() == 1);
    CHECK(st.per_id.at(0x100).mu == Catch::Approx(10'000.0));
    CHECK(st.vib_samples == samples.size());
    CHECK(st.vib_threshold() > 0.2);
    CHECK(st.vib_threshold() < 0.5);

    CHECK_THROWS_AS(warm_up(frames, samples, 59 * kMicrosPerSecond), std::runtime_error);
}

TEST_CASE("unknown id raises one alert, known id stays quiet") {
    WarmRig rig;
    rig.det.observe_frame(frame_at(0x6EE, kMinute + 5'000, {0x01}));
    REQUIRE(rig.count(EventClass::UnknownId) == 1);
    CHECK(rig.events[0].subject == "frame:0x6ee");
    CHECK(rig.events[0].time == kMinute + 5'000);

    rig.events.clear();
    // One period after the last warm frame: perfectly on schedule.
    rig.det.observe_frame(frame_at(0x100, kMinute, {0x10, 0x20}));
    CHECK(rig.events.empty());
}

TEST_CASE("unknown id alerts deduplicate within a rate window") {
    WarmRig rig;
    // Same stray id four times inside one 100 ms window: one alert.
    for (int i = 0; i < 4; ++i)
        rig.det.observe_frame(frame_at(0x6EE, kMinute + 1'000 * (i + 1), {0x01}));
    CHECK(rig.count(EventClass::UnknownId) == 1);

    // Next window: the same id alerts once more.
    rig.det.observe_frame(frame_at(0x6EE, kMinute + 150'000, {0x01}));
    CHECK(rig.count(EventClass::UnknownId) == 2);
}

TEST_CASE("timing z-score fires just above the configured threshold") {
    // Zero jitter → variance 0 → the 100 µs sigma floor applies, so k = 6
    // means any gap off by more than 600 µs alerts.
    SECTION("601 us late") {
        WarmRig rig;
        Time last = kMinute - 10'000;  // warm feed ends at 59.990 s
        rig.det.observe_frame(frame_at(0x100, last + 10'601, {0x10, 0x20}));
        REQUIRE(rig.count(EventClass::TimingAnomaly) == 1);
        const std::string ev(rig.events[0].evidence.begin(), rig.events[0].evidence.end());
        CHECK(ev.find("seg=critical") == 0);
        CHECK(ev.find("z=6.01") != std::string::npos);
    }
    SECTION("599 us late stays quiet") {
        WarmRig rig;
        Time last = kMinute - 10'000;
        rig.det.observe_frame(frame_at(0x100, last + 10'599, {0x10, 0x20}));
        CHECK(rig.count(EventClass::TimingAnomaly) == 0);
    }
}

TEST_CASE("repeat timing anomalies escalate to warning severity") {
    WarmRig rig;
    Time last = kMinute - 10'000;
    rig.det.observe_frame(frame_at(0x100, last + 2'000, {0x10, 0x20}));
    rig.det.observe_frame(frame_at(0x100, last + 4'000, {0x10, 0x20}));
    REQUIRE(rig.count(EventClass::TimingAnomaly) == 2);
    CHECK(rig.events[0].severity == Severity::Info);
    CHECK(rig.events[1].severity == Severity::Warning);
}

TEST_CASE("benign jitter never crosses the timing threshold") {
    SinkRig rig;
    Detector det(IdsConfig{}, rig.sink());
    det.begin_warmup(0);
    feed_periodic(det, 0x100, 10'000, 500, kMinute, 3, {0xAA});
    det.end_warmup(kMinute);
    rig.events.clear();

    Detector live(det.state(), rig.sink());
    // Continue the same jittered traffic for another minute; uniform ±500 µs
    // jitter gives z ≤ ~2σ-equivalents, far below k = 6.
    Rng rng = Rng::for_label(4, "cont");
    for (Time t = kMinute; t < 2 * kMinute; t += 10'000) {
        Time at = t + static_cast<Time>(rng.next_in(-500, 500) + 500);
        live.observe_frame(frame_at(0x100, at, {0xAA}));
    }
    CHECK(rig.count(EventClass::TimingAnomaly) == 0);
}

TEST_CASE("payload bytes outside the learned range alert, margin is honored") {
    WarmRig rig;  // learned payload constant {0x10, 0x20}
    // On-schedule arrival so only the payload check can fire.
    Time t = kMinute;
    SECTION("inside margin of 2") {
        rig.det.observe_frame(frame_at(0x100, t, {0x12, 0x1E}));
        CHECK(rig.count(EventClass::TimingAnomaly) == 0);
    }
    SECTION("one past the margin") {
        rig.det.observe_frame(frame_at(0x100, t, {0x13, 0x20}));
        REQUIRE(rig.count(EventClass::TimingAnomaly) == 1);
        const std::string ev(rig.events[0].evidence.begin(), rig.events[0].evidence.end());
        CHECK(ev.find("payload") != std::string::npos);
    }
    SECTION("length change alerts") {
        rig.det.observe_frame(frame_at(0x100, t, {0x10, 0x20, 0x00}));
        CHECK(rig.count(EventClass::TimingAnomaly) == 1);
    }
}

TEST_CASE("authenticator companion ids are exempt from payload-range checks") {
    // Companion frames carry a freshness counter and truncated MAC — bytes
    // that drift past any range a warm-up could learn.  Above the exemption
    // line the payload check stays silent; everything else still applies.
    SinkRig rig;
    Detector det(IdsConfig{}, rig.sink());
    det.begin_warmup(0);
    feed_periodic(det, 0x4A0, 10'000, 0, kMinute, 1, {0x00, 0x00, 0x00, 0x01});
    feed_periodic(det, 0x0A0, 10'000, 0, kMinute, 2, {0x00, 0x00, 0x00, 0x01});
    det.end_warmup(kMinute);
    rig.events.clear();

    SECTION("wild bytes above the line pass") {
        det.observe_frame(frame_at(0x4A0, kMinute, {0xDE, 0xAD, 0xBE, 0xEF}));
        CHECK(rig.count(EventClass::TimingAnomaly) == 0);
    }
    SECTION("the same bytes below the line still alert") {
        det.observe_frame(frame_at(0x0A0, kMinute, {0xDE, 0xAD, 0xBE, 0xEF}));
        CHECK(rig.count(EventClass::TimingAnomaly) == 1);
    }
    SECTION("exemption is scoped to the critical segment") {
        SinkRig rig2;
        Detector det2(IdsConfig{}, rig2.sink());
        det2.begin_warmup(0);
        feed_periodic(det2, 0x4A0, 10'000, 0, kMinute, 1, {0x01});
        det2.end_warmup(kMinute);
        rig2.events.clear();
        CanFrame f = frame_at(0x4A0, kMinute, {0xFF}, Segment::NonCritical);
        det2.observe_frame(f);
        CHECK(rig2.count(EventClass::TimingAnomaly) == 1);
    }
    SECTION("unknown companion-range ids still alert") {
        det.observe_frame(frame_at(0x4B0, kMinute, {0xDE, 0xAD}));
        CHECK(rig.count(EventClass::UnknownId) == 1);
    }
}

TEST_CASE("flood detection: one alert per window, silence below threshold") {
    WarmRig rig;
    // 3,000 fps over 100 ms windows → limit 300 frames per window.
    SECTION("400 unknown frames in one window → one flood alert") {
        Time base = kMinute;
        for (int i = 0; i < 400; ++i)
            rig.det.observe_frame(frame_at(static_cast<uint16_t>(0x700 + (i % 64)),
                                           base + static_cast<Time>(i) * 200, {0xFF}));
        CHECK(rig.count(EventClass::Flood) == 1);
        // Unknown-id alerts are capped and fully suppressed once the flood
        // alert is active.
        CHECK(rig.count(EventClass::UnknownId) <= kMaxUnknownAlertsPerWindow);
    }
    SECTION("two saturated windows → two flood alerts") {
        for (int w = 0; w < 2; ++w) {
            Time base = kMinute + static_cast<Time>(w) * 100'000;
            for (int i = 0; i < 350; ++i)
                rig.det.observe_frame(frame_at(static_cast<uint16_t>(0x700 + (i % 64)),
                                               base + static_cast<Time>(i) * 280, {0xFF}));
        }
        CHECK(rig.count(EventClass::Flood) == 2);
    }
    SECTION("10 fps stays quiet") {
        for (int i = 0; i < 10; ++i)
            rig.det.observe_frame(frame_at(0x700, kMinute + static_cast<Time>(i) * 100'000, {0xFF}));
        CHECK(rig.count(EventClass::Flood) == 0);
    }
}

TEST_CASE("inspection budget: 125 full inspections per 10 ms window") {
    WarmRig rig;
    const uint64_t before_full = rig.det.fully_inspected();
    const uint64_t before_all = rig.det.frames_observed();
    // 300 frames packed into one budget window (spacing 20 µs).
    for (int i = 0; i < 300; ++i)
        rig.det.observe_frame(frame_at(0x100, kMinute + static_cast<Time>(i) * 20, {0x10, 0x20}));
    CHECK(rig.det.frames_observed() - before_all == 300);
    CHECK(rig.det.fully_inspected() - before_full == 125);

    // The next window starts with a fresh budget.
    rig.det.observe_frame(frame_at(0x100, kMinute + 10'000, {0x10, 0x20}));
    CHECK(rig.det.fully_inspected() - before_full == 126);
}

TEST_CASE("sustained mixed flood keeps inspection rate above 95 percent") {
    // 10,000 fps of attack plus ~1,900 fps benign is ~119 frames per 10 ms
    // window against a capacity of 125, so the detector keeps up.
    WarmRig rig;
    const uint64_t base_full = rig.det.fully_inspected();
    const uint64_t base_all = rig.det.frames_observed();
    Rng rng = Rng::for_label(5, "flood");
    for (Time t = kMinute; t < kMinute + 2 * kMicrosPerSecond; t += 100) {
        rig.det.observe_frame(frame_at(static_cast<uint16_t>(0x400 + rng.next_below(0x3FF)),
                                       t, {0xEE}));
        if (t % 10'000 == 0)
            for (int i = 0; i < 19; ++i)
                rig.det.observe_frame(frame_at(0x100, t + static_cast<Time>(i) * 400, {0x10, 0x20}));
    }
    const double inspected =
        static_cast<double>(rig.det.fully_inspected() - base_full) /
        static_cast<double>(rig.det.frames_observed() - base_all);
    CHECK(inspected >= 0.95);
    CHECK(rig.count(EventClass::Flood) >= 19);  // every saturated window alerts once
}

TEST_CASE("vibration spike detection against the learned floor") {
    WarmRig rig;  // σ = 0.05 baseline → threshold ≈ 0.34 g
    const double thr = rig.det.state().vib_threshold();
    CHECK(thr > 0.25);
    CHECK(thr < 0.45);

    SECTION("3 g spike alerts once despite consecutive hot samples") {
        for (int i = 0; i < 5; ++i)
            rig.det.observe_sample({SensorKind::Vibration, kMinute + static_cast<Time>(i) * 10'000,
                                    3.0 + 0.02 * i, 0});
        CHECK(rig.count(EventClass::VibrationSpike) == 1);
        CHECK(rig.events[0].time == kMinute);
    }
    SECTION("0.06 g bump stays quiet") {
        rig.det.observe_sample({SensorKind::Vibration, kMinute, 0.06, 0});
        CHECK(rig.count(EventClass::VibrationSpike) == 0);
    }
    SECTION("a second spike after the refractory second alerts again") {
        rig.det.observe_sample({SensorKind::Vibration, kMinute, 3.0, 0});
        rig.det.observe_sample({SensorKind::Vibration, kMinute + 2 * kMicrosPerSecond, 3.0, 0});
        CHECK(rig.count(EventClass::VibrationSpike) == 2);
    }
}

TEST_CASE("a noisy mount hides a glass-break spike") {
    // Baseline σ = 1.2: threshold ≈ 8.1 g, while the worst observable sample
    // is 3.6 g of clipped noise plus the 3 g spike.
    SinkRig rig;
    Detector det(IdsConfig{}, rig.sink());
    det.begin_warmup(0);
    feed_periodic(det, 0x100, 10'000, 0, kMinute, 1, {0xAA});
    feed_vibration(det, 1.2, kMinute, 2);
    det.end_warmup(kMinute);
    rig.events.clear();

    CHECK(det.state().vib_threshold() > 6.7);
    Rng rng = Rng::for_label(11, "noisy");
    for (int i = 0; i < 5; ++i) {
        double noise = std::min(std::abs(rng.next_gaussian()), 3.0) * 1.2;
        det.observe_sample({SensorKind::Vibration, kMinute + static_cast<Time>(i) * 10'000,
                            noise + 3.0, 0});
    }
    CHECK(rig.count(EventClass::VibrationSpike) == 0);
}

TEST_CASE("haversine distance matches reference values") {
    CHECK(haversine_m(0, 0, 0, 1) == Catch::Approx(111'194.9266).epsilon(1e-6));
    CHECK(haversine_m(52.2296756, 21.0122287, 41.8919300, 12.5113300) ==
          Catch::Approx(1'315'510.156).epsilon(1e-6));
    CHECK(haversine_m(40.7128, -74.0060, 40.7128, -74.0060) == 0.0);
}

TEST_CASE("geofence: inside silent, outside alerts once per excursion") {
    IdsConfig cfg;
    cfg.fence = Geofence{40.7128, -74.0060, 500.0};
    WarmRig rig(cfg);

    auto gps = [](Time t, double lat, double lon) {
        return SensorSample{SensorKind::Gps, t, lat, lon};
    };
    SECTION("sample at the center: no alert") {
        rig.det.observe_sample(gps(kMinute, 40.7128, -74.0060));
        CHECK(rig.count(EventClass::GeofenceBreach) == 0);
    }
    SECTION("1.01 radii due north: alert") {
        rig.det.observe_sample(gps(kMinute, 40.7128 + 0.0045415741, -74.0060));
        REQUIRE(rig.count(EventClass::GeofenceBreach) == 1);
        CHECK(rig.events[0].subject == "sensor:gps");
    }
    SECTION("edge-triggered: out, out, in, out gives two alerts") {
        rig.det.observe_sample(gps(kMinute, 40.72, -74.0060));
        rig.det.observe_sample(gps(kMinute + 1'000'000, 40.73, -74.0060));
        rig.det.observe_sample(gps(kMinute + 2'000'000, 40.7128, -74.0060));
        rig.det.observe_sample(gps(kMinute + 3'000'000, 40.72, -74.0060));
        CHECK(rig.count(EventClass::GeofenceBreach) == 2);
    }
}

TEST_CASE("degenerate zero-radius fence flags any off-center fix") {
    IdsConfig cfg;
    cfg.fence = Geofence{40.7128, -74.0060, 0.0};
    WarmRig rig(cfg);
    rig.det.observe_sample({SensorKind::Gps, kMinute, 40.71281, -74.0060});
    CHECK(rig.count(EventClass::GeofenceBreach) == 1);
}

TEST_CASE("adaptive updates step thresholds deterministically") {
    WarmRig rig;
    CHECK(rig.det.z_max() == 6.0);
    CHECK(rig.det.vib_sigma_factor() == 10.0);

    rig.det.adaptive_update("fp:timing", kMinute);
    CHECK(rig.det.z_max() == 6.5);
    rig.det.adaptive_update("miss:timing", kMinute + 1);
    CHECK(rig.det.z_max() == 6.0);
    rig.det.adaptive_update("miss:vibration", kMinute + 2);
    CHECK(rig.det.vib_sigma_factor() == 9.0);
    rig.det.adaptive_update("fp:vibration", kMinute + 3);
    CHECK(rig.det.vib_sigma_factor() == 10.0);

    CHECK(rig.count(EventClass::AdaptiveUpdate) == 4);
    CHECK_THROWS_AS(rig.det.adaptive_update("fp:geofence", kMinute + 4), std::invalid_argument);
}

TEST_CASE("adaptive steps saturate at their caps and floors") {
    WarmRig rig;
    for (int i = 0; i < 30; ++i) rig.det.adaptive_update(AdaptiveLabel::TimingFalsePositive, kMinute);
    CHECK(rig.det.z_max() == 12.0);
    for (int i = 0; i < 60; ++i) rig.det.adaptive_update(AdaptiveLabel::TimingMiss, kMinute);
    CHECK(rig.det.z_max() == 1.0);
    for (int i = 0; i < 30; ++i) rig.det.adaptive_update(AdaptiveLabel::VibrationMiss, kMinute);
    CHECK(rig.det.vib_sigma_factor() == 2.0);
}

TEST_CASE("replaying a label sequence lands on identical thresholds") {
    std::vector<std::string> labels = {"fp:timing", "fp:timing", "miss:vibration",
                                       "miss:timing", "fp:vibration"};
    auto run = [&] {
        WarmRig rig;
        for (const auto& l : labels) rig.det.adaptive_update(l, kMinute);
        return std::make_pair(rig.det.z_max(), rig.det.vib_sigma_factor());
    };
    CHECK(run() == run());
}

TEST_CASE("lowering k only ever adds timing alerts") {
    // Warm one baseline, then replay the same perturbed trace at k = 6 and
    // k = 3; the k = 6 alert set must be a subset of the k = 3 set.
    SinkRig warm;
    Detector base(IdsConfig{}, warm.sink());
    base.begin_warmup(0);
    feed_periodic(base, 0x100, 10'000, 300, kMinute, 6, {0xAA});
    feed_periodic(base, 0x200, 25'000, 0, kMinute, 7, {0xBB});
    base.end_warmup(kMinute);

    std::vector<CanFrame> trace;
    Rng rng = Rng::for_label(8, "perturb");
    Time t = kMinute;
    for (int i = 0; i < 2'000; ++i) {
        // Irregular gaps from 1 to 30 ms: a spread of z values around both
        // thresholds.
        t += 1'000 + rng.next_below(29'000);
        trace.push_back(frame_at(rng.next_below(2) ? 0x100 : 0x200, t,
                                 rng.next_below(2) ? Bytes{0xAA} : Bytes{0xBB}));
    }

    auto alert_times = [&](double k) {
        DetectorState st = base.state();
        st.cfg.z_max = k;
        SinkRig out;
        Detector det(st, out.sink());
        for (const auto& f : trace) det.observe_frame(f);
        std::set<std::pair<Time, std::string>> times;
        for (const auto& e : out.events)
            if (e.cls == EventClass::TimingAnomaly) times.insert({e.time, e.subject});
        return times;
    };

    auto k6 = alert_times(6.0);
    auto k3 = alert_times(3.0);
    REQUIRE_FALSE(k6.empty());
    CHECK(k3.size() >= k6.size());
    CHECK(std::includes(k3.begin(), k3.end(), k6.begin(), k6.end()));
}

TEST_CASE("no alert is emitted before warm-up completes") {
    SinkRig rig;
    Detector det(IdsConfig{}, rig.sink());
    det.begin_warmup(0);
    // Wild traffic during learning: unknown-looking ids, bursts, spikes.
    for (int i = 0; i < 500; ++i)
        det.observe_frame(frame_at(static_cast<uint16_t>(i & 0x7FF),
                                   static_cast<Time>(i) * 50, {0xFF}));
    det.observe_sample({SensorKind::Vibration, 1'000, 5.0, 0});
    CHECK(rig.events.empty());
}

TEST_CASE("enforcer maps alerts to blocking actions") {
    SinkRig actions;
    int freezes = 0;
    Enforcer enf(actions.sink(), [&freezes] { ++freezes; });

    auto alert = [](EventClass cls, std::string subject, std::string ev) {
        return EventRecord{cls, Severity::Critical, 1'000, std::move(subject),
                           Bytes(ev.begin(), ev.end())};
    };

    SECTION("unknown id on the critical segment is dropped") {
        enf.on_alert(alert(EventClass::UnknownId, "frame:0x6ee", "seg=critical;dlc=1"));
        REQUIRE(actions.count(EventClass::FrameDropped) == 1);
        CHECK(actions.events[0].subject == "frame:0x6ee");
        CHECK(actions.events[0].time == 1'000);
    }
    SECTION("unknown id on the noncritical segment is left alone") {
        enf.on_alert(alert(EventClass::UnknownId, "frame:0x6ee", "seg=noncritical;dlc=1"));
        CHECK(actions.events.empty());
    }
    SECTION("frame auth failure drops; fob auth failure has no frame to drop") {
        enf.on_alert(alert(EventClass::AuthFailure, "frame:0x0a0", "seg=critical;verdict=orphan"));
        enf.on_alert(alert(EventClass::AuthFailure, "fob:0x00000001", "rolling code mismatch"));
        CHECK(actions.count(EventClass::FrameDropped) == 1);
    }
    SECTION("flood rate-limits, obd intrusion freezes the port once") {
        enf.on_alert(alert(EventClass::Flood, "bus", "window_frames=301;limit=300"));
        CHECK(actions.count(EventClass::RateLimited) == 1);
        enf.on_alert(alert(EventClass::ObdIntrusion, "device:0x0bad0001", "bad_response"));
        enf.on_alert(alert(EventClass::ObdIntrusion, "device:0x0bad0001", "port_frozen"));
        CHECK(freezes == 1);
        CHECK(enf.froze_obd());
    }
}
