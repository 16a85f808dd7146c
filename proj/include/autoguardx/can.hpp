#pragma once
// Two-segment CAN model. Each segment is its own wire: frames transmitted
// within one virtual instant form an arbitration slot and deliver lowest-id
// first; receivers see only their own segment (network isolation is
// structural, not policy).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "autoguardx/bytes.hpp"
#include "autoguardx/kernel.hpp"

namespace agx {

enum class Segment : uint8_t { Critical = 0, NonCritical = 1 };

inline const char* segment_name(Segment s) {
    return s == Segment::Critical ? "critical" : "noncritical";
}

constexpr uint16_t kMaxCanId = 0x7FF;
constexpr size_t kMaxDlc = 8;

struct CanFrame {
    uint16_t id = 0;
    Bytes payload;
    Time timestamp = 0;
    Segment segment = Segment::Critical;
    std::string source;  // simulation metadata, not on-wire

    size_t dlc() const { return payload.size(); }
};

struct DeliveryRecord {
    uint64_t bus_seq;  // position in the segment's total frame count
    Time slot_time;
};

class CanBus {
public:
    using FrameFn = std::function<void(const CanFrame&)>;

    explicit CanBus(Kernel& kernel) : kernel_(kernel) {}

    // Receivers with an id filter (ECU applications).
    void attach_node(Segment seg, std::unordered_set<uint16_t> rx_filter, FrameFn rx) {
        lane(seg).nodes.push_back({std::move(rx_filter), std::move(rx)});
    }

    // Receivers that see every frame on the segment in delivery order
    // (detector taps, trace sinks).
    void observe(Segment seg, FrameFn fn) { lane(seg).observers.push_back(std::move(fn)); }

    DeliveryRecord transmit(CanFrame frame) {
        if (frame.id > kMaxCanId) throw std::invalid_argument("CAN id exceeds 11 bits");
        if (frame.payload.size() > kMaxDlc) throw std::invalid_argument("CAN payload exceeds 8 bytes");
        Lane& ln = lane(frame.segment);
        frame.timestamp = kernel_.now();
        uint64_t seq = ln.total_frames++;
        Time slot_time = frame.timestamp;
        ln.pending.push_back(std::move(frame));
        if (ln.pending.size() == 1) {
            // First frame of a new slot: flush after every event already
            // queued at this instant has had its chance to join the slot.
            Segment seg = ln.pending.front().segment;
            kernel_.schedule(slot_time, [this, seg] { flush(lane(seg)); });
        }
        return {seq, slot_time};
    }

    uint64_t frames_on(Segment seg) const { return lane_[static_cast<size_t>(seg)].total_frames; }

private:
    struct Node {
        std::unordered_set<uint16_t> filter;
        FrameFn rx;
    };
    struct Lane {
        std::vector<CanFrame> pending;
        std::vector<Node> nodes;
        std::vector<FrameFn> observers;
        uint64_t total_frames = 0;
    };

    Lane& lane(Segment s) { return lane_[static_cast<size_t>(s)]; }

    void flush(Lane& ln) {
        std::vector<CanFrame> slot;
        slot.swap(ln.pending);
        // Arbitration: lowest id wins; equal ids keep transmit order.
        std::stable_sort(slot.begin(), slot.end(),
                         [](const CanFrame& a, const CanFrame& b) { return a.id < b.id; });
        for (const CanFrame& f : slot) {
            for (const auto& obs : ln.observers) obs(f);
            for (const auto& node : ln.nodes)
                if (node.filter.count(f.id)) node.rx(f);
        }
    }

    Kernel& kernel_;
    Lane lane_[2];
};

}  // namespace agx
