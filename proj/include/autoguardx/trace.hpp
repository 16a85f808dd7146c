#pragma once
// Trace sinks. One JSON line per frame or sensor sample, fixed field order,
// so a trace (or its running SHA-256) is a stable fingerprint of a run.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "autoguardx/can.hpp"
#include "autoguardx/crypto.hpp"
#include "autoguardx/sensors.hpp"

namespace agx {

inline std::string trace_line(const CanFrame& f) {
    char head[96];
    int n = std::snprintf(head, sizeof head,
                          "{\"kind\":\"frame\",\"time_us\":%llu,\"id\":\"0x%03x\",\"payload_hex\":\"",
                          static_cast<unsigned long long>(f.timestamp), f.id);
    std::string line(head, n);
    line += to_hex(f.payload);
    line += "\",\"segment\":\"";
    line += segment_name(f.segment);
    line += "\",\"source\":\"";
    line += f.source;
    line += "\"}";
    return line;
}

inline std::string trace_line(const SensorSample& s) {
    char buf[160];
    int n;
    if (s.kind == SensorKind::Vibration)
        n = std::snprintf(buf, sizeof buf, "{\"kind\":\"vibration\",\"time_us\":%llu,\"value_g\":%.6f}",
                          static_cast<unsigned long long>(s.timestamp), s.a);
    else
        n = std::snprintf(buf, sizeof buf, "{\"kind\":\"gps\",\"time_us\":%llu,\"lat\":%.7f,\"lon\":%.7f}",
                          static_cast<unsigned long long>(s.timestamp), s.a, s.b);
    return std::string(buf, n);
}

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_frame(const CanFrame&) {}
    virtual void on_sample(const SensorSample&) {}
};

class NullTrace : public TraceSink {};

class MemoryTrace : public TraceSink {
public:
    void on_frame(const CanFrame& f) override { frames.push_back(f); }
    void on_sample(const SensorSample& s) override { samples.push_back(s); }
    std::vector<CanFrame> frames;
    std::vector<SensorSample> samples;
};

// Streams the canonical lines into SHA-256 without retaining them.
class HashTrace : public TraceSink {
public:
    void on_frame(const CanFrame& f) override { absorb(trace_line(f)); }
    void on_sample(const SensorSample& s) override { absorb(trace_line(s)); }
    std::string hex_digest() { return to_hex(hash_.finish()); }

private:
    void absorb(const std::string& line) {
        hash_.update(reinterpret_cast<const uint8_t*>(line.data()), line.size());
        hash_.update(reinterpret_cast<const uint8_t*>("\n"), 1);
    }
    Sha256 hash_;
};

class JsonlTrace : public TraceSink {
public:
    explicit JsonlTrace(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open trace file: " + path);
    }
    void on_frame(const CanFrame& f) override { out_ << trace_line(f) << '\n'; }
    void on_sample(const SensorSample& s) override { out_ << trace_line(s) << '\n'; }

private:
    std::ofstream out_;
};

}  // namespace agx
