#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "autoguardx/traffic.hpp"

using namespace agx;

namespace {
EcuNode one_node(Time period_us, Time jitter_us) {
    EcuNode n;
    n.node_id = "bcm";
    n.segment = Segment::Critical;
    n.tx_profile = {{0x0A0, period_us, jitter_us, PayloadSpec::constant({0x00, 0x01})}};
    return n;
}
}  // namespace

TEST_CASE("zero-jitter stream emits exactly duration/period frames") {
    MemoryTrace trace;
    run_benign_profile({one_node(10'000, 0)}, 1.0, 42, trace, /*with_sensors=*/false);
    REQUIRE(trace.frames.size() == 100);
    for (const CanFrame& f : trace.frames) {
        REQUIRE(f.id == 0x0A0);
        REQUIRE(f.source == "bcm");
    }
}

TEST_CASE("same seed reproduces the trace, different seed does not") {
    std::vector<EcuNode> fleet = {one_node(10'000, 2'000)};
    HashTrace a, b, c;
    run_benign_profile(fleet, 2.0, 7, a);
    run_benign_profile(fleet, 2.0, 7, b);
    run_benign_profile(fleet, 2.0, 8, c);
    std::string ha = a.hex_digest();
    REQUIRE(ha == b.hex_digest());
    REQUIRE(ha != c.hex_digest());
}

TEST_CASE("jittered stream count stays within period-bound envelope") {
    const Time period = 10'000, jitter = 2'000;
    const double dur_s = 5.0;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        MemoryTrace trace;
        run_benign_profile({one_node(period, jitter)}, dur_s, seed, trace, false);
        // n inter-arrivals each in [period - jitter, period + jitter], plus a
        // phase offset < period at the front.
        size_t lo = static_cast<size_t>(seconds(dur_s) / (period + jitter));
        size_t hi = static_cast<size_t>(seconds(dur_s) / (period - jitter)) + 1;
        REQUIRE(trace.frames.size() >= lo);
        REQUIRE(trace.frames.size() <= hi);
        Time prev = 0;
        bool first = true;
        for (const CanFrame& f : trace.frames) {
            if (!first) {
                Time dt = f.timestamp - prev;
                REQUIRE(dt >= period - jitter);
                REQUIRE(dt <= period + jitter);
            }
            first = false;
            prev = f.timestamp;
        }
    }
}

TEST_CASE("multi-node fleet: per-id counts and sensor cadence") {
    EcuNode a;
    a.node_id = "engine";
    a.segment = Segment::Critical;
    a.tx_profile = {{0x1B0, 20'000, 0, PayloadSpec::counter({0, 0x10, 0x20})},
                    {0x1B1, 50'000, 0, PayloadSpec::ranged({10, 10}, {20, 14})}};
    EcuNode b;
    b.node_id = "infotainment";
    b.segment = Segment::NonCritical;
    b.tx_profile = {{0x500, 100'000, 0, PayloadSpec::constant({0xFF})}};

    MemoryTrace trace;
    run_benign_profile({a, b}, 10.0, 99, trace);

    std::map<uint16_t, size_t> counts;
    for (const CanFrame& f : trace.frames) counts[f.id]++;
    REQUIRE(counts[0x1B0] == 500);
    REQUIRE(counts[0x1B1] == 200);
    REQUIRE(counts[0x500] == 100);

    size_t vib = 0, gps = 0;
    for (const SensorSample& s : trace.samples) {
        if (s.kind == SensorKind::Vibration) {
            ++vib;
            REQUIRE(s.a >= 0.0);
        } else {
            ++gps;
            REQUIRE(s.a >= -90.0);
            REQUIRE(s.a <= 90.0);
            REQUIRE(s.b >= -180.0);
            REQUIRE(s.b <= 180.0);
        }
    }
    REQUIRE(vib == 1000);  // 100 Hz for 10 s
    REQUIRE(gps == 10);    // 1 Hz
}

TEST_CASE("ranged payloads stay in range; counter payloads cycle") {
    EcuNode n;
    n.node_id = "x";
    n.segment = Segment::Critical;
    n.tx_profile = {{0x111, 1'000, 0, PayloadSpec::ranged({100, 0}, {116, 4})},
                    {0x112, 1'000, 0, PayloadSpec::counter({0, 0xAB})}};
    MemoryTrace trace;
    run_benign_profile({n}, 1.0, 5, trace, false);
    uint8_t seen_min = 255, seen_max = 0;
    int last_counter = -1;
    for (const CanFrame& f : trace.frames) {
        if (f.id == 0x111) {
            REQUIRE(f.payload[0] >= 100);
            REQUIRE(f.payload[0] <= 116);
            REQUIRE(f.payload[1] <= 4);
            seen_min = std::min(seen_min, f.payload[0]);
            seen_max = std::max(seen_max, f.payload[0]);
        } else {
            REQUIRE(f.payload[1] == 0xAB);
            if (last_counter >= 0) REQUIRE(f.payload[0] == uint8_t(last_counter + 1));
            last_counter = f.payload[0];
        }
    }
    // 1000 draws over a width-17 range hit both extremes.
    REQUIRE(seen_min == 100);
    REQUIRE(seen_max == 116);
}

TEST_CASE("degenerate profiles") {
    MemoryTrace trace;
    run_benign_profile({}, 1.0, 1, trace);
    REQUIRE(trace.frames.empty());
    REQUIRE(trace.samples.empty());
    REQUIRE_THROWS_AS(run_benign_profile({one_node(10'000, 0)}, 0.0, 1, trace),
                      std::invalid_argument);

    EcuNode bad = one_node(10'000, 10'000);  // jitter == period
    REQUIRE_THROWS_AS(run_benign_profile({bad}, 1.0, 1, trace), std::invalid_argument);
}
