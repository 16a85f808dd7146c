#pragma once
// ECU traffic generators. Each periodic message stream draws from its own
// labeled RNG stream (seed ^ hash(node/id)), so a node's trace does not
// depend on fleet ordering; payloads come from small declarative specs the
// detector's byte-range model can learn.

#include <functional>
#include <string>
#include <vector>

#include "autoguardx/can.hpp"
#include "autoguardx/kernel.hpp"
#include "autoguardx/rng.hpp"

namespace agx {

struct PayloadSpec {
    enum class Kind { Constant, Counter, Ranged };
    Kind kind = Kind::Constant;
    Bytes base;  // Constant: the payload; Counter: template, byte 0 counts; Ranged: per-byte min
    Bytes max;   // Ranged only: per-byte max, inclusive

    static PayloadSpec constant(Bytes b) { return {Kind::Constant, std::move(b), {}}; }
    static PayloadSpec counter(Bytes tmpl) { return {Kind::Counter, std::move(tmpl), {}}; }
    static PayloadSpec ranged(Bytes lo, Bytes hi) { return {Kind::Ranged, std::move(lo), std::move(hi)}; }

    Bytes generate(Rng& rng, uint64_t n) const {
        switch (kind) {
            case Kind::Constant:
                return base;
            case Kind::Counter: {
                Bytes p = base;
                if (!p.empty()) p[0] = static_cast<uint8_t>(n);
                return p;
            }
            case Kind::Ranged: {
                Bytes p(base.size());
                for (size_t i = 0; i < p.size(); ++i)
                    p[i] = static_cast<uint8_t>(rng.next_in(base[i], max[i]));
                return p;
            }
        }
        return {};
    }
};

struct TxMessage {
    uint16_t id;
    Time period_us;
    Time jitter_us;  // must be < period
    PayloadSpec payload;
};

struct EcuNode {
    std::string node_id;
    Segment segment;
    std::vector<TxMessage> tx_profile;
    std::unordered_set<uint16_t> rx_filter;
};

inline void validate(const EcuNode& n) {
    for (const TxMessage& m : n.tx_profile) {
        if (m.period_us == 0) throw std::invalid_argument(n.node_id + ": message period must be > 0");
        if (m.jitter_us >= m.period_us)
            throw std::invalid_argument(n.node_id + ": jitter must be smaller than period");
    }
}

// Drives one node's periodic streams. Frames leave through `send`, which the
// harness points either straight at the bus (factory) or at the frame
// authenticator (protected).
class EcuDriver {
public:
    using SendFn = std::function<void(CanFrame&&)>;

    EcuDriver(Kernel& k, EcuNode node, uint64_t seed, SendFn send)
        : kernel_(k), node_(std::move(node)), send_(std::move(send)) {
        validate(node_);
        streams_.reserve(node_.tx_profile.size());
        for (const TxMessage& m : node_.tx_profile) {
            std::string label = node_.node_id + "/" + std::to_string(m.id);
            streams_.push_back({m, Rng::for_label(seed, label), 0});
        }
    }

    void start(Time from) {
        for (size_t i = 0; i < streams_.size(); ++i) {
            // Random phase inside one period spreads ids across slots.
            Time phase = streams_[i].rng.next_below(streams_[i].spec.period_us);
            kernel_.schedule(from + phase, [this, i] { emit(i); });
        }
    }

    const EcuNode& node() const { return node_; }

private:
    struct Stream {
        TxMessage spec;
        Rng rng;
        uint64_t count;
    };

    void emit(size_t i) {
        Stream& s = streams_[i];
        CanFrame f;
        f.id = s.spec.id;
        f.segment = node_.segment;
        f.source = node_.node_id;
        f.payload = s.spec.payload.generate(s.rng, s.count++);
        send_(std::move(f));
        Time next = kernel_.now() + s.spec.period_us;
        if (s.spec.jitter_us > 0)
            next += s.rng.next_below(2 * s.spec.jitter_us + 1) - s.spec.jitter_us;
        kernel_.schedule(next, [this, i] { emit(i); });
    }

    Kernel& kernel_;
    EcuNode node_;
    SendFn send_;
    std::vector<Stream> streams_;
};

}  // namespace agx
