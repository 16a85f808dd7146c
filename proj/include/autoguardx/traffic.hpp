#pragma once
// Stand-alone benign run: fleet + sensors on a fresh kernel, no defense
// stack. Used for detector warm-up material and determinism checks.

#include <memory>
#include <vector>

#include "autoguardx/ecu.hpp"
#include "autoguardx/sensors.hpp"
#include "autoguardx/trace.hpp"

namespace agx {

inline void run_benign_profile(const std::vector<EcuNode>& fleet, double duration_s, uint64_t seed,
                               TraceSink& sink, bool with_sensors = true) {
    if (duration_s <= 0) throw std::invalid_argument("duration must be positive");
    if (fleet.empty()) return;

    Kernel kernel;
    CanBus bus(kernel);
    bus.observe(Segment::Critical, [&](const CanFrame& f) { sink.on_frame(f); });
    bus.observe(Segment::NonCritical, [&](const CanFrame& f) { sink.on_frame(f); });

    std::vector<std::unique_ptr<EcuDriver>> drivers;
    for (const EcuNode& node : fleet) {
        drivers.push_back(std::make_unique<EcuDriver>(
            kernel, node, seed, [&bus](CanFrame&& f) { bus.transmit(std::move(f)); }));
        drivers.back()->start(0);
    }

    std::unique_ptr<VibrationSensor> vib;
    std::unique_ptr<GpsSensor> gps;
    if (with_sensors) {
        auto emit = [&sink](const SensorSample& s) { sink.on_sample(s); };
        vib = std::make_unique<VibrationSensor>(kernel, Rng::for_label(seed, "sensor/vibration"),
                                                0.05, emit);
        gps = std::make_unique<GpsSensor>(kernel, Rng::for_label(seed, "sensor/gps"), 40.7128,
                                          -74.0060, emit);
        vib->start(0);
        gps->start(0);
    }

    kernel.run_until(seconds(duration_s));
}

}  // namespace agx
