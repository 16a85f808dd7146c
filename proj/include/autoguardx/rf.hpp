#pragma once
// Keyless-entry RF link between vehicle and fob. Attackers get two handles:
// passive taps (see every delivered message) and forwarders (re-deliver a
// copy after added delay). A live relay adds latency to each leg instead —
// the fob is out of direct range and all traffic rides the relay.

#include <functional>
#include <vector>

#include "autoguardx/bytes.hpp"
#include "autoguardx/kernel.hpp"

namespace agx {

enum class RfDirection : uint8_t { FobToVehicle, VehicleToFob };

struct RfMessage {
    RfDirection direction;
    Bytes payload;
    Time emit_time;
    Time path_latency;
};

class RfChannel {
public:
    using RxFn = std::function<void(const RfMessage&)>;

    RfChannel(Kernel& k, Time one_way_latency_us = 1000)
        : kernel_(k), base_latency_(one_way_latency_us) {}

    void on_vehicle_rx(RxFn fn) { vehicle_rx_ = std::move(fn); }  // FobToVehicle sink
    void on_fob_rx(RxFn fn) { fob_rx_ = std::move(fn); }          // VehicleToFob sink

    void add_tap(RxFn fn) { taps_.push_back(std::move(fn)); }

    // One-way forwarding tap: a copy of each delivered message in `dir`
    // arrives again `added` µs later.
    void add_forwarder(RfDirection dir, Time added) { forwarders_.push_back({dir, added}); }

    // Live relay: every leg (both directions) picks up extra latency.
    void set_leg_extra(Time fob_to_vehicle, Time vehicle_to_fob) {
        leg_extra_[0] = fob_to_vehicle;
        leg_extra_[1] = vehicle_to_fob;
    }
    void clear_relay() { leg_extra_[0] = leg_extra_[1] = 0; }

    RfMessage send(RfDirection dir, Bytes payload) {
        RfMessage msg{dir, std::move(payload), kernel_.now(),
                      base_latency_ + leg_extra_[static_cast<size_t>(dir)]};
        schedule_delivery(msg, /*forwarded=*/false);
        return msg;
    }

    Time base_latency() const { return base_latency_; }

private:
    struct Forwarder {
        RfDirection dir;
        Time added;
    };

    void schedule_delivery(RfMessage msg, bool forwarded) {
        Time at = msg.emit_time + msg.path_latency;
        kernel_.schedule(at, [this, msg = std::move(msg), forwarded] { deliver(msg, forwarded); });
    }

    void deliver(const RfMessage& msg, bool forwarded) {
        for (const auto& tap : taps_) tap(msg);
        const RxFn& rx = msg.direction == RfDirection::FobToVehicle ? vehicle_rx_ : fob_rx_;
        if (rx) rx(msg);
        if (!forwarded) {
            for (const Forwarder& f : forwarders_) {
                if (f.dir != msg.direction) continue;
                RfMessage copy = msg;
                copy.path_latency += f.added;
                schedule_delivery(copy, /*forwarded=*/true);
            }
        }
    }

    Kernel& kernel_;
    Time base_latency_;
    Time leg_extra_[2] = {0, 0};
    RxFn vehicle_rx_, fob_rx_;
    std::vector<RxFn> taps_;
    std::vector<Forwarder> forwarders_;
};

}  // namespace agx
