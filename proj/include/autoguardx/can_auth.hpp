#pragma once
// CAN frame authentication. Every protected base frame (id ≤ 0x3FF) is
// followed by a companion frame at id+0x400 carrying a 4-byte freshness
// counter and a 4-byte truncated HMAC-SHA256 over id ‖ payload ‖ freshness
// under the segment key. The receiving gate holds base frames until their
// companion verifies; a base frame with no companion inside 1 ms is an
// orphan and is dropped.

#include <deque>
#include <unordered_map>

#include "autoguardx/can.hpp"
#include "autoguardx/crypto.hpp"
#include "autoguardx/events.hpp"

namespace agx {

constexpr uint16_t kAuthIdOffset = 0x400;
constexpr uint16_t kMaxAuthBaseId = 0x3FF;
constexpr Time kOrphanDeadline = 1'000;  // µs

inline bool is_companion_id(uint16_t id) { return id >= kAuthIdOffset && id <= kMaxCanId; }

// MAC input: id(2B BE) ‖ payload ‖ fresh(4B BE).
inline std::array<uint8_t, 4> frame_tag(const HmacKey& seg_key, uint16_t id,
                                        std::span<const uint8_t> payload, uint32_t fresh) {
    uint8_t msg[2 + kMaxDlc + 4];
    msg[0] = static_cast<uint8_t>(id >> 8);
    msg[1] = static_cast<uint8_t>(id);
    std::copy(payload.begin(), payload.end(), msg + 2);
    size_t n = 2 + payload.size();
    msg[n] = static_cast<uint8_t>(fresh >> 24);
    msg[n + 1] = static_cast<uint8_t>(fresh >> 16);
    msg[n + 2] = static_cast<uint8_t>(fresh >> 8);
    msg[n + 3] = static_cast<uint8_t>(fresh);
    auto full = seg_key.mac(std::span<const uint8_t>(msg, n + 4));
    return {full[0], full[1], full[2], full[3]};
}

inline CanFrame make_companion(const HmacKey& seg_key, const CanFrame& base, uint32_t fresh) {
    if (base.id > kMaxAuthBaseId)
        throw std::invalid_argument("authenticated base ids must be <= 0x3FF");
    CanFrame tag_frame;
    tag_frame.id = base.id + kAuthIdOffset;
    tag_frame.segment = base.segment;
    tag_frame.source = base.source;
    tag_frame.payload.resize(8);
    tag_frame.payload[0] = static_cast<uint8_t>(fresh >> 24);
    tag_frame.payload[1] = static_cast<uint8_t>(fresh >> 16);
    tag_frame.payload[2] = static_cast<uint8_t>(fresh >> 8);
    tag_frame.payload[3] = static_cast<uint8_t>(fresh);
    auto tag = frame_tag(seg_key, base.id, base.payload, fresh);
    std::copy(tag.begin(), tag.end(), tag_frame.payload.begin() + 4);
    return tag_frame;
}

// Sender side: stamps each protected frame with the next per-id freshness
// value and emits base + companion in the same arbitration slot.
class FrameAuthenticator {
public:
    FrameAuthenticator(CanBus& bus, const Bytes& seg_key) : bus_(bus), key_(seg_key) {}

    void send(CanFrame&& base) {
        uint32_t fresh = next_fresh_[base.id]++;
        CanFrame companion = make_companion(key_, base, fresh);
        bus_.transmit(std::move(base));
        bus_.transmit(std::move(companion));
    }

private:
    CanBus& bus_;
    HmacKey key_;
    std::unordered_map<uint16_t, uint32_t> next_fresh_;
};

enum class FrameVerdict : uint8_t { Accept, BadTag, Stale, Orphan };

inline const char* frame_verdict_name(FrameVerdict v) {
    switch (v) {
        case FrameVerdict::Accept: return "accept";
        case FrameVerdict::BadTag: return "bad_tag";
        case FrameVerdict::Stale: return "stale";
        case FrameVerdict::Orphan: return "orphan";
    }
    return "?";
}

// Stateless pair check used by tests and by the gate below.
inline FrameVerdict verify_frame(const HmacKey& seg_key, const CanFrame& base,
                                 const CanFrame& tag_frame, uint32_t last_fresh,
                                 bool any_accepted) {
    if (tag_frame.id != base.id + kAuthIdOffset || tag_frame.payload.size() != 8)
        return FrameVerdict::BadTag;
    uint32_t fresh = read_be32(tag_frame.payload.data());
    auto expect = frame_tag(seg_key, base.id, base.payload, fresh);
    if (!ct_equal(expect, std::span<const uint8_t>(tag_frame.payload.data() + 4, 4)))
        return FrameVerdict::BadTag;
    if (any_accepted && fresh <= last_fresh) return FrameVerdict::Stale;
    return FrameVerdict::Accept;
}

// Receiver side. Registered as a bus observer; delivers verified protected
// frames to the application and reports every rejection.
class AuthGate {
public:
    using DeliverFn = std::function<void(const CanFrame&)>;
    using RejectFn = std::function<void(FrameVerdict, const CanFrame&)>;

    AuthGate(Kernel& k, const Bytes& seg_key, std::unordered_set<uint16_t> protected_ids,
             DeliverFn deliver, RejectFn on_reject)
        : kernel_(k),
          key_(seg_key),
          protected_ids_(std::move(protected_ids)),
          deliver_(std::move(deliver)),
          on_reject_(std::move(on_reject)) {}

    void on_bus_frame(const CanFrame& f) {
        if (protected_ids_.count(f.id)) {
            pending_[f.id].push_back({f, kernel_.now()});
            ++pending_total_;
            schedule_sweep(kernel_.now() + kOrphanDeadline);
            return;
        }
        if (is_companion_id(f.id) && protected_ids_.count(f.id - kAuthIdOffset))
            on_companion(f);
        // Unprotected ids are not deliverable through the gate; the detector
        // handles them separately.
    }

    uint64_t accepted() const { return accepted_; }

private:
    struct PendingFrame {
        CanFrame frame;
        Time arrived;
    };
    struct FreshState {
        uint32_t last = 0;
        bool any = false;
    };

    void on_companion(const CanFrame& tag_frame) {
        uint16_t base_id = tag_frame.id - kAuthIdOffset;
        auto it = pending_.find(base_id);
        FreshState& fs = fresh_[base_id];
        if (it != pending_.end()) {
            auto& q = it->second;
            for (auto qi = q.begin(); qi != q.end(); ++qi) {
                FrameVerdict v = verify_frame(key_, qi->frame, tag_frame, fs.last, fs.any);
                if (v == FrameVerdict::BadTag) continue;  // tag is for some other pending frame
                if (v == FrameVerdict::Accept) {
                    fs.last = read_be32(tag_frame.payload.data());
                    fs.any = true;
                    ++accepted_;
                    deliver_(qi->frame);
                } else {  // Stale: authenticated bytes, replayed counter — drop the pair
                    on_reject_(v, qi->frame);
                }
                q.erase(qi);
                drop_pending();
                return;
            }
        }
        // No pending frame matches this tag: forged or orphaned companion.
        on_reject_(FrameVerdict::BadTag, tag_frame);
    }

    void drop_pending() {
        if (--pending_total_ == 0 && sweep_scheduled_) {
            kernel_.cancel(sweep_event_);
            sweep_scheduled_ = false;
        }
    }

    void schedule_sweep(Time at) {
        if (sweep_scheduled_ && sweep_at_ <= at) return;
        sweep_scheduled_ = true;
        sweep_at_ = at;
        sweep_event_ = kernel_.schedule(at, [this] { sweep(); });
    }

    void sweep() {
        sweep_scheduled_ = false;
        if (pending_total_ == 0) return;
        Time now = kernel_.now();
        Time next_due = 0;
        for (auto& [id, q] : pending_) {
            while (!q.empty() && now >= q.front().arrived + kOrphanDeadline) {
                on_reject_(FrameVerdict::Orphan, q.front().frame);
                q.pop_front();
                --pending_total_;
            }
            if (!q.empty()) {
                Time due = q.front().arrived + kOrphanDeadline;
                if (next_due == 0 || due < next_due) next_due = due;
            }
        }
        if (next_due != 0) schedule_sweep(next_due);
    }

    Kernel& kernel_;
    HmacKey key_;
    std::unordered_set<uint16_t> protected_ids_;
    DeliverFn deliver_;
    RejectFn on_reject_;
    std::unordered_map<uint16_t, std::deque<PendingFrame>> pending_;
    std::unordered_map<uint16_t, FreshState> fresh_;
    bool sweep_scheduled_ = false;
    Time sweep_at_ = 0;
    EventHandle sweep_event_ = 0;
    uint64_t pending_total_ = 0;
    uint64_t accepted_ = 0;
};

}  // namespace agx
