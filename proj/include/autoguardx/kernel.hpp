#pragma once
// Discrete-event kernel. Virtual time is microseconds in a u64; events fire
// in (time, insertion-seq) order so equal-time events dispatch FIFO and every
// run of the same schedule is reproducible.

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace agx {

using Time = uint64_t;  // virtual µs

constexpr Time kMicrosPerSecond = 1'000'000;
constexpr Time seconds(double s) { return static_cast<Time>(s * 1e6); }

using EventHandle = uint64_t;

class Kernel {
public:
    Time now() const { return now_; }

    EventHandle schedule(Time at, std::function<void()> fn) {
        if (at < now_) throw std::invalid_argument("cannot schedule an event in the past");
        EventHandle h = next_seq_++;
        queue_.push(Item{at, h, std::move(fn)});
        return h;
    }

    EventHandle schedule_in(Time delay, std::function<void()> fn) {
        return schedule(now_ + delay, std::move(fn));
    }

    // Cancelled events are tombstoned and skipped at dispatch.
    void cancel(EventHandle h) { cancelled_.insert(h); }

    bool step() {
        while (!queue_.empty()) {
            if (!cancelled_.empty() && cancelled_.erase(queue_.top().seq) > 0) {
                queue_.pop();
                continue;
            }
            Item item = std::move(const_cast<Item&>(queue_.top()));
            queue_.pop();
            now_ = item.at;
            item.fn();
            return true;
        }
        return false;
    }

    // Dispatches every event strictly before `end`, then parks the clock at
    // `end`. The simulated interval is [start, end).
    void run_until(Time end) {
        while (!queue_.empty() && queue_.top().at < end) {
            if (!cancelled_.empty() && cancelled_.erase(queue_.top().seq) > 0) {
                queue_.pop();
                continue;
            }
            Item item = std::move(const_cast<Item&>(queue_.top()));
            queue_.pop();
            now_ = item.at;
            item.fn();
        }
        if (end > now_) now_ = end;
    }

    void run() {
        while (step()) {
        }
    }

    bool empty() const { return queue_.size() == cancelled_.size(); }
    size_t pending() const { return queue_.size(); }

private:
    struct Item {
        Time at;
        uint64_t seq;
        std::function<void()> fn;
        bool operator>(const Item& o) const {
            return at != o.at ? at > o.at : seq > o.seq;
        }
    };

    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
    std::unordered_set<uint64_t> cancelled_;
    Time now_ = 0;
    uint64_t next_seq_ = 1;
};

}  // namespace agx
