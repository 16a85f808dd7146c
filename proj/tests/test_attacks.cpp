// Attack toolkit: capture/replay/relay on the RF link, CAN injection and
// flood generators, OBD and storage attacks, and the fob spoofer.  Also the
// oblivious-attacker property: attack emissions never depend on defense
// internals.

#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "autoguardx/attacks.hpp"
#include "autoguardx/sealed.hpp"

using namespace agx;

namespace {

const Bytes kKey = {0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
                    0x08, 0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x0E, 0x0F};
constexpr uint32_t kFob = 1;

// Vehicle + provisioned fob on one RF channel.  The vehicle stores the last
// accepted counter; the fob holds the next one to transmit.
struct UnlockRig {
    Kernel kernel;
    RfChannel channel{kernel};
    std::vector<EventRecord> events;
    std::vector<UnlockOutcome> outcomes;
    FobUnit fob;
    VehicleUnlockUnit vehicle;

    explicit UnlockRig(bool rolling)
        : fob(channel, fob_state(), rolling),
          vehicle(kernel, channel, vehicle_state(), rolling, Rng::for_label(42, "nonce"),
                  [this](const EventRecord& e) { events.push_back(e); }) {
        vehicle.on_outcome([this](UnlockOutcome o) { outcomes.push_back(o); });
    }

    static RollingCodeState vehicle_state() { return {kKey, 5, kDefaultWindow, kFob}; }
    static RollingCodeState fob_state() { return {kKey, 6, kDefaultWindow, kFob}; }

    size_t count(EventClass c) const {
        return static_cast<size_t>(std::count_if(
            events.begin(), events.end(), [c](const EventRecord& e) { return e.cls == c; }));
    }
};

}  // namespace

TEST_CASE("rf recorder captures fob transmissions byte-exact and in order") {
    Kernel kernel;
    RfChannel channel(kernel);
    RollingCodeState fob_state{kKey, 3, kDefaultWindow, kFob};
    FobUnit fob(channel, fob_state, /*rolling=*/true);
    RfRecorder rec(channel);

    kernel.schedule(1'000, [&] { fob.press(); });
    kernel.schedule(500'000, [&] { fob.press(); });
    kernel.run();

    // No vehicle on the channel, so each press emits exactly one greeting.
    REQUIRE(rec.recordings().size() == 2);
    Bytes hello{wire::kHello};
    put_be32(hello, kFob);
    CHECK(rec.recordings()[0].payload == hello);
    CHECK(rec.recordings()[1].payload == hello);
    CHECK(rec.recordings()[0].heard_at == 2'000);  // emit + 1 ms path
    CHECK(rec.recordings()[1].heard_at == 501'000);

    CHECK(rec.in_window(0, 10'000).size() == 1);
    CHECK(rec.in_window(0, 1'000'000).size() == 2);
    CHECK(rec.in_window(10'000, 10'000).empty());  // empty window
    CHECK(rec.in_window(600'000, 700'000).empty());  // no traffic there
}

TEST_CASE("replayed static code unlocks a factory vehicle again") {
    UnlockRig rig(/*rolling=*/false);
    RfRecorder rec(rig.channel);

    rig.kernel.schedule(1'000'000, [&] { rig.fob.press(); });
    rig.kernel.schedule(5'000'000, [&] {
        REQUIRE(rec.recordings().size() == 1);
        rf_replay(rig.kernel, rig.channel, rec.recordings()[0].payload);
    });
    rig.kernel.run();

    CHECK(rig.outcomes == std::vector<UnlockOutcome>{UnlockOutcome::Unlocked,
                                                     UnlockOutcome::Unlocked});
    CHECK(rig.vehicle.accepted_count() == 2);
    CHECK_THROWS_AS(rf_replay(rig.kernel, rig.channel, {}), std::invalid_argument);
}

TEST_CASE("replayed exchange against rolling verification is rejected as replay") {
    UnlockRig rig(/*rolling=*/true);
    RfRecorder rec(rig.channel);

    rig.kernel.schedule(1'000'000, [&] { rig.fob.press(); });
    // Replay the captured greeting and answer with their original spacing.
    rig.kernel.schedule(5'000'000, [&] {
        std::vector<Bytes> msgs;
        for (const auto& r : rec.recordings()) msgs.push_back(r.payload);
        rf_replay_exchange(rig.kernel, rig.channel, std::move(msgs), rig.kernel.now());
    });
    rig.kernel.run();

    REQUIRE(rig.outcomes.size() == 2);
    CHECK(rig.outcomes[0] == UnlockOutcome::Unlocked);
    CHECK(rig.outcomes[1] == UnlockOutcome::RejectedReplay);
    CHECK(rig.vehicle.accepted_count() == 1);
    CHECK(rig.count(EventClass::AuthFailure) == 1);
}

TEST_CASE("live relay trips the latency bound; clearing it restores service") {
    UnlockRig rig(/*rolling=*/true);
    rf_relay_window(rig.kernel, rig.channel, rig.fob, 1'000'000, 1'000'000, 11'000);
    rig.kernel.schedule(3'000'000, [&] { rig.fob.press(); });
    rig.kernel.run();

    REQUIRE(rig.outcomes.size() == 2);
    CHECK(rig.outcomes[0] == UnlockOutcome::RejectedLatencyBound);
    CHECK(rig.outcomes[1] == UnlockOutcome::Unlocked);
    CHECK(rig.count(EventClass::RelaySuspect) == 1);
    CHECK(rig.vehicle.accepted_count() == 1);
}

TEST_CASE("sub-threshold relay slips under the bound — documented residual risk") {
    UnlockRig rig(/*rolling=*/true);
    rf_relay_window(rig.kernel, rig.channel, rig.fob, 1'000'000, 1'000'000, 500);
    rig.kernel.run();
    CHECK(rig.outcomes == std::vector<UnlockOutcome>{UnlockOutcome::Unlocked});
}

TEST_CASE("relay does not bother a factory vehicle at all") {
    UnlockRig rig(/*rolling=*/false);
    rf_relay_window(rig.kernel, rig.channel, rig.fob, 1'000'000, 1'000'000, 11'000);
    rig.kernel.run();
    CHECK(rig.outcomes == std::vector<UnlockOutcome>{UnlockOutcome::Unlocked});
}

TEST_CASE("can_inject emits tagless frames at the configured rate") {
    Kernel kernel;
    CanBus bus(kernel);
    std::vector<CanFrame> seen;
    bus.observe(Segment::Critical, [&](const CanFrame& f) { seen.push_back(f); });

    Bytes payload = {0x01, 0xFF, 0xFF, 0xFF};
    can_inject(kernel, bus, Segment::Critical, 0x0A0, payload, 20.0, 0, kMicrosPerSecond);
    kernel.run();

    REQUIRE(seen.size() == 20);
    for (size_t i = 0; i < seen.size(); ++i) {
        CHECK(seen[i].id == 0x0A0);
        CHECK(seen[i].payload == payload);
        CHECK(seen[i].source == "atk:inject");
        CHECK(seen[i].timestamp == static_cast<Time>(i) * 50'000);
    }
    CHECK_THROWS_AS(can_inject(kernel, bus, Segment::Critical, 0x0A0, payload, 0.0, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("can_flood avoids excluded ids and reproduces per seed") {
    auto run = [](uint64_t seed) {
        Kernel kernel;
        CanBus bus(kernel);
        std::vector<CanFrame> seen;
        bus.observe(Segment::Critical, [&](const CanFrame& f) { seen.push_back(f); });
        can_flood(kernel, bus, Segment::Critical, 1'000.0, 0, 2 * kMicrosPerSecond,
                  {0x100, 0x101, 0x4A0}, Rng::for_label(seed, "flood"));
        kernel.run();
        return seen;
    };

    auto a = run(1);
    REQUIRE(a.size() == 2'000);
    for (const auto& f : a) {
        CHECK(f.id <= kMaxCanId);
        CHECK(f.id != 0x100);
        CHECK(f.id != 0x101);
        CHECK(f.id != 0x4A0);
        CHECK(f.source == "atk:flood");
    }

    auto b = run(1);
    REQUIRE(b.size() == a.size());
    bool identical = true;
    for (size_t i = 0; i < a.size(); ++i)
        identical = identical && a[i].id == b[i].id && a[i].payload == b[i].payload;
    CHECK(identical);

    auto c = run(2);
    bool differs = false;
    for (size_t i = 0; i < a.size(); ++i) differs = differs || a[i].id != c[i].id;
    CHECK(differs);

    Kernel kernel;
    CanBus bus(kernel);
    CHECK_THROWS_AS(
        can_flood(kernel, bus, Segment::Critical, 0.5, 0, 1, {}, Rng::for_label(1, "x")),
        std::invalid_argument);
}

TEST_CASE("obd reprogram attempt fails against the authenticated port") {
    Kernel kernel;
    std::vector<EventRecord> events;
    Bytes dealer_key(32, 0x5A);
    ObdPort port(kernel, {{0x00D1A601, dealer_key}}, /*enforce=*/true,
                 Rng::for_label(3, "obd"), [&](const EventRecord& e) { events.push_back(e); });

    Rng atk = Rng::for_label(3, "attacker");
    SECTION("unknown programmer device") {
        auto r = obd_reprogram_attempt(port, 0x0BAD0001, 0x99, atk);
        CHECK_FALSE(r.succeeded);
        CHECK(port.programmed_fobs().empty());
        REQUIRE(events.size() == 1);
        CHECK(events[0].cls == EventClass::ObdIntrusion);
        CHECK(events[0].subject == "device:0x0bad0001");
    }
    SECTION("stolen device id without the key") {
        auto r = obd_reprogram_attempt(port, 0x00D1A601, 0x99, atk);
        CHECK_FALSE(r.succeeded);
        REQUIRE(events.size() == 1);
        const std::string why(events[0].evidence.begin(), events[0].evidence.end());
        CHECK(why == "bad_response");
    }
}

TEST_CASE("obd reprogram attempt succeeds against the factory port") {
    Kernel kernel;
    ObdPort port(kernel, {}, /*enforce=*/false, Rng::for_label(3, "obd"), nullptr);
    Rng atk = Rng::for_label(3, "attacker");
    auto r = obd_reprogram_attempt(port, 0x0BAD0001, 0x99, atk);
    CHECK(r.succeeded);
    CHECK(r.programmed_fob == 0x99);
    REQUIRE(port.programmed_fobs().size() == 1);
    CHECK(port.programmed_fobs()[0] == 0x99);
}

TEST_CASE("storage exfiltration: plaintext leaks markers, sealed bytes do not") {
    const std::string line = "1200 UNLOCK accepted fob 1\n";
    SECTION("plaintext log") {
        Bytes image(line.begin(), line.end());
        auto r = usb_exfiltrate(image);
        CHECK(r.marker_found);
        CHECK(r.image == image);
    }
    SECTION("sealed log") {
        LogKeys keys{Bytes(32, 0x11), Bytes(32, 0x22)};
        RecordSealer sealer(keys, 0x1122334455667788ULL);
        Bytes image;
        for (int i = 0; i < 20; ++i) {
            auto rec = sealer.seal(Bytes(line.begin(), line.end()));
            Bytes wire = rec.serialize();
            image.insert(image.end(), wire.begin(), wire.end());
        }
        auto r = usb_exfiltrate(image);
        CHECK_FALSE(r.marker_found);
        CHECK(r.image.size() == 20 * (16 + line.size() + 32));
    }
    SECTION("empty store") {
        auto r = usb_exfiltrate({});
        CHECK(r.image.empty());
        CHECK_FALSE(r.marker_found);
    }
    SECTION("marker longer than image") {
        CHECK_FALSE(contains_marker({'U', 'N'}, "UNLOCK"));
    }
}

TEST_CASE("glass break injects a spike envelope over baseline noise") {
    Kernel kernel;
    std::vector<SensorSample> samples;
    VibrationSensor sensor(kernel, Rng::for_label(4, "vib"), 0.05,
                           [&](const SensorSample& s) { samples.push_back(s); });
    sensor.start(0);
    glass_break(sensor, 500'000, 3.0, 50'000);
    kernel.run_until(kMicrosPerSecond);

    REQUIRE(samples.size() == 100);
    int in_spike = 0;
    for (const auto& s : samples) {
        if (s.timestamp >= 500'000 && s.timestamp < 550'000) {
            ++in_spike;
            CHECK(s.a >= 3.0);
        } else {
            CHECK(s.a <= 0.16);  // clipped noise floor only
        }
    }
    CHECK(in_spike == 5);
    CHECK_THROWS_AS(glass_break(sensor, 0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("spoofer against rolling verification: every answer is a bad code") {
    UnlockRig rig(/*rolling=*/true);
    SpooferFob spoofer(rig.kernel, rig.channel, kFob, Rng::for_label(5, "spoof"));
    // The owner unlocks once; the spoofer reads the cleartext counter off that
    // exchange and forges ahead of it, so the code check is what rejects it.
    rig.kernel.schedule(500'000, [&] { rig.fob.press(); });
    spoofer.run(1'000'000, 3, 200'000);
    rig.kernel.run();

    CHECK(rig.outcomes == std::vector<UnlockOutcome>{UnlockOutcome::Unlocked,
                                                     UnlockOutcome::RejectedBadCode,
                                                     UnlockOutcome::RejectedBadCode,
                                                     UnlockOutcome::RejectedBadCode});
    CHECK(rig.vehicle.accepted_count() == 1);
    CHECK(spoofer.responses_sent() == 3);
    CHECK_FALSE(spoofer.captured_static());
    CHECK(rig.count(EventClass::AuthFailure) == 3);
}

TEST_CASE("spoofer against a fixed code replays what it overheard") {
    UnlockRig rig(/*rolling=*/false);
    SpooferFob spoofer(rig.kernel, rig.channel, kFob, Rng::for_label(5, "spoof"));
    rig.kernel.schedule(500'000, [&] { rig.fob.press(); });  // owner's own press
    spoofer.run(1'000'000, 2, 200'000);
    rig.kernel.run();

    CHECK(spoofer.captured_static());
    CHECK(rig.vehicle.accepted_count() == 3);  // one genuine + two spoofed
    CHECK(rig.count(EventClass::AuthFailure) == 0);  // factory raises no alarm
}

TEST_CASE("attacker emissions are identical with and without defense reporting") {
    // Same seeds, one run with an event sink and one without: the bytes the
    // spoofer puts on the air must match exactly.
    auto run = [](bool with_sink) {
        Kernel kernel;
        RfChannel channel(kernel);
        std::vector<EventRecord> events;
        EventSink sink = nullptr;
        if (with_sink) sink = [&events](const EventRecord& e) { events.push_back(e); };
        VehicleUnlockUnit vehicle(kernel, channel, UnlockRig::vehicle_state(), true,
                                  Rng::for_label(42, "nonce"), sink);
        std::vector<Bytes> uplink;
        channel.add_tap([&](const RfMessage& m) {
            if (m.direction == RfDirection::FobToVehicle) uplink.push_back(m.payload);
        });
        SpooferFob spoofer(kernel, channel, kFob, Rng::for_label(5, "spoof"));
        spoofer.run(1'000'000, 3, 200'000);
        kernel.run();
        return uplink;
    };
    CHECK(run(true) == run(false));
}
