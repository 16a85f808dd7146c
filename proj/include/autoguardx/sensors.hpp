#pragma once
// Vibration and GPS sources. Vibration samples at 100 Hz: folded-gaussian
// floor noise, clipped at 3σ (sensor conditioning), plus any scripted spike
// envelopes. GPS samples at 1 Hz around a configured position.

#include <cmath>
#include <functional>
#include <vector>

#include "autoguardx/kernel.hpp"
#include "autoguardx/rng.hpp"

namespace agx {

enum class SensorKind : uint8_t { Vibration, Gps };

struct SensorSample {
    SensorKind kind;
    Time timestamp;
    double a = 0;  // vibration: magnitude in g; gps: latitude deg
    double b = 0;  // gps: longitude deg
};

class VibrationSensor {
public:
    using SampleFn = std::function<void(const SensorSample&)>;

    VibrationSensor(Kernel& k, Rng rng, double sigma_g, SampleFn out)
        : kernel_(k), rng_(rng), sigma_(sigma_g), out_(std::move(out)) {}

    static constexpr Time kPeriod = 10'000;  // 100 Hz

    void start(Time at) {
        kernel_.schedule(at, [this] { tick(); });
    }

    // Additive spike envelope over [start, start + dur).
    void add_spike(Time start, Time dur, double peak_g) {
        spikes_.push_back({start, start + dur, peak_g});
    }

private:
    struct Spike {
        Time from, to;
        double peak;
    };

    void tick() {
        double noise = std::abs(rng_.next_gaussian()) * sigma_;
        noise = std::min(noise, 3.0 * sigma_);
        double v = noise;
        Time t = kernel_.now();
        for (const Spike& s : spikes_)
            if (t >= s.from && t < s.to) v += s.peak;
        out_({SensorKind::Vibration, t, v, 0});
        kernel_.schedule(t + kPeriod, [this] { tick(); });
    }

    Kernel& kernel_;
    Rng rng_;
    double sigma_;
    SampleFn out_;
    std::vector<Spike> spikes_;
};

class GpsSensor {
public:
    using SampleFn = std::function<void(const SensorSample&)>;

    GpsSensor(Kernel& k, Rng rng, double lat, double lon, SampleFn out)
        : kernel_(k), rng_(rng), lat_(lat), lon_(lon), out_(std::move(out)) {}

    static constexpr Time kPeriod = 1'000'000;  // 1 Hz

    void start(Time at) {
        kernel_.schedule(at, [this] { tick(); });
    }

    // Scripted displacement (e.g. vehicle driven away) applied from a time on.
    void add_offset(Time from, double dlat, double dlon) {
        offsets_.push_back({from, dlat, dlon});
    }

private:
    struct Offset {
        Time from;
        double dlat, dlon;
    };

    void tick() {
        Time t = kernel_.now();
        // ~1 m of fix jitter.
        double lat = lat_ + (rng_.next_double() - 0.5) * 2e-5;
        double lon = lon_ + (rng_.next_double() - 0.5) * 2e-5;
        for (const Offset& o : offsets_)
            if (t >= o.from) {
                lat += o.dlat;
                lon += o.dlon;
            }
        out_({SensorKind::Gps, t, lat, lon});
        kernel_.schedule(t + kPeriod, [this] { tick(); });
    }

    Kernel& kernel_;
    Rng rng_;
    double lat_, lon_;
    SampleFn out_;
    std::vector<Offset> offsets_;
};

}  // namespace agx
