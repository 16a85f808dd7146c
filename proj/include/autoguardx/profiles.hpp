#pragma once
// The simulated test fleet: twelve vehicles, three per brand A–D.  A profile
// bundles the knobs that differ across the fleet — vibration noise floor,
// what the stock security system reacts to, whether the headlight cavity
// gives physical access to the CAN harness — plus the ECU traffic plan all
// vehicles share.

#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "autoguardx/ecu.hpp"

namespace agx {

// Body-control command conventions on the critical segment.  The door module
// listens on one id; a payload whose first byte carries the unlock command
// opens the doors.  The benign heartbeat keeps that byte at zero.
constexpr uint16_t kDoorCommandId = 0x0A0;
constexpr uint8_t kDoorUnlockByte = 0x01;

struct BrandProfile {
    std::string name;  // "A1" .. "D3"
    char brand = '?';

    // Baseline chassis vibration in g.  One vehicle in the fleet has a rattly
    // shock-sensor mount; its noise floor swallows a glass-break spike.
    double vibration_sigma = 0.05;

    // Stock (pre-retrofit) security behavior.
    bool stock_glass_alarm = false;     // shock sensor wired to the horn
    bool stock_can_alarm = false;       // stock alarm watches the body bus for odd commands
    bool stock_obd_gatekeeper = false;  // dealer-tool authentication required even stock

    // Whether the headlight cavity exposes the CAN harness.  Brand A routes
    // its loom behind the fender liner, out of reach from the lamp opening.
    bool headlight_harness_exposed = true;
};

// Latency of a stock alarm reacting to its trigger (horn relay plus siren).
constexpr Time kStockAlarmLatency = 300'000;

inline std::vector<BrandProfile> test_fleet() {
    std::vector<BrandProfile> fleet;
    auto add = [&](const char* name, char brand) -> BrandProfile& {
        fleet.push_back({});
        fleet.back().name = name;
        fleet.back().brand = brand;
        return fleet.back();
    };

    add("A1", 'A').headlight_harness_exposed = false;
    add("A2", 'A').headlight_harness_exposed = false;
    add("A3", 'A').headlight_harness_exposed = false;

    add("B1", 'B');
    add("B2", 'B');
    add("B3", 'B');

    // Brand C ships the most capable stock package: bus-watching alarm on all
    // three, a shock sensor on two, and dealer-authenticated diagnostics on
    // the flagship.
    {
        BrandProfile& c1 = add("C1", 'C');
        c1.stock_glass_alarm = true;
        c1.stock_can_alarm = true;
        c1.stock_obd_gatekeeper = true;
    }
    {
        BrandProfile& c2 = add("C2", 'C');
        c2.stock_glass_alarm = true;
        c2.stock_can_alarm = true;
    }
    add("C3", 'C').stock_can_alarm = true;

    add("D1", 'D');
    add("D2", 'D');
    // Worn shock-sensor mount: ~24x the normal noise floor.
    add("D3", 'D').vibration_sigma = 1.2;

    return fleet;
}

inline const BrandProfile& profile_by_name(const std::vector<BrandProfile>& fleet,
                                           const std::string& name) {
    for (const BrandProfile& p : fleet)
        if (p.name == name) return p;
    throw std::invalid_argument("unknown vehicle profile: " + name);
}

// Shared benign ECU plan.  Critical application ids stay at or below 0x3FF so
// that, in protected mode, each one's authenticator companion (id + 0x400)
// still fits the 11-bit space.
inline std::vector<EcuNode> benign_nodes(bool zero_jitter = false) {
    auto j = [zero_jitter](Time jitter) { return zero_jitter ? Time{0} : jitter; };

    std::vector<EcuNode> nodes;

    EcuNode bcm{"bcm", Segment::Critical, {}, {}};
    bcm.tx_profile.push_back({kDoorCommandId, 100'000, j(5'000),
                              PayloadSpec::constant({0x00, 0x00, 0x00, 0x00})});
    bcm.tx_profile.push_back({0x0B0, 200'000, j(10'000), PayloadSpec::counter({0x00, 0x00})});
    nodes.push_back(std::move(bcm));

    EcuNode powertrain{"powertrain", Segment::Critical, {}, {}};
    powertrain.tx_profile.push_back(
        {0x100, 10'000, j(500), PayloadSpec::ranged({0x10, 0x00}, {0x30, 0xFF})});
    powertrain.tx_profile.push_back(
        {0x110, 20'000, j(1'000), PayloadSpec::ranged({0x00, 0x00}, {0x28, 0xFF})});
    nodes.push_back(std::move(powertrain));

    EcuNode brakes{"brakes", Segment::Critical, {}, {}};
    brakes.tx_profile.push_back(
        {0x150, 10'000, j(500), PayloadSpec::counter({0x00, 0x00, 0x00, 0x00})});
    nodes.push_back(std::move(brakes));

    EcuNode gateway{"gateway", Segment::Critical, {}, {}};
    gateway.tx_profile.push_back({0x300, 1'000'000, j(50'000), PayloadSpec::constant({0x01})});
    nodes.push_back(std::move(gateway));

    // Non-critical ids also stay below 0x400.  The intrusion detector keys its
    // per-id statistics by id alone, so parking these streams outside the
    // companion band keeps them from sharing a bucket with an authenticator id.
    EcuNode infotainment{"infotainment", Segment::NonCritical, {}, {}};
    infotainment.tx_profile.push_back(
        {0x200, 50'000, j(2'500), PayloadSpec::ranged({0x00, 0x00, 0x00}, {0xFF, 0xFF, 0x03})});
    infotainment.tx_profile.push_back(
        {0x210, 100'000, j(5'000), PayloadSpec::counter({0x00, 0x00})});
    nodes.push_back(std::move(infotainment));

    EcuNode climate{"climate", Segment::NonCritical, {}, {}};
    climate.tx_profile.push_back({0x220, 250'000, j(12'000), PayloadSpec::constant({0x16, 0x00})});
    nodes.push_back(std::move(climate));

    return nodes;
}

// Heavy background telemetry for load tests: one chatty node streaming at the
// given rate on the non-critical segment.
inline EcuNode telemetry_node(double rate_fps) {
    if (rate_fps <= 0.0) throw std::invalid_argument("telemetry rate must be positive");
    EcuNode n{"telemetry", Segment::NonCritical, {}, {}};
    n.tx_profile.push_back({0x230, static_cast<Time>(1e6 / rate_fps), 0,
                            PayloadSpec::ranged({0x00, 0x00, 0x00, 0x00},
                                                {0xFF, 0xFF, 0xFF, 0xFF})});
    return n;
}

// All critical application ids in the benign plan — the protected set in
// AutoGuardX mode.
inline std::unordered_set<uint16_t> critical_app_ids() {
    std::unordered_set<uint16_t> ids;
    for (const EcuNode& n : benign_nodes())
        if (n.segment == Segment::Critical)
            for (const TxMessage& m : n.tx_profile) ids.insert(m.id);
    return ids;
}

}  // namespace agx
