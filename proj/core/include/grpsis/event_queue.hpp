#pragma once

#include "grpsis/network.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace grpsis {

enum class EventKind : std::uint8_t { Recovery, TransmissionAttempt };

/// A scheduled state change. Events carry the epochs of the nodes involved at scheduling time;
/// an event whose epochs no longer match is stale and is dropped when popped.
struct Event {
    double time = 0.0;
    std::uint64_t sequence = 0;     // insertion order, breaks time ties deterministically
    NodeId source = 0;              // recovering node, or the transmitting node
    NodeId target = 0;              // transmission target (unused for recoveries)
    std::uint32_t source_epoch = 0;
    std::uint32_t target_epoch = 0;
    EventKind kind = EventKind::Recovery;
};

/// Binary min-heap on (time, sequence). Removal is lazy: nothing is ever erased early.
class EventQueue {
public:
    void push(Event event) {
        event.sequence = next_sequence_++;
        heap_.push_back(event);
        std::push_heap(heap_.begin(), heap_.end(), later);
    }

    const Event& top() const { return heap_.front(); }

    Event pop() {
        std::pop_heap(heap_.begin(), heap_.end(), later);
        const Event event = heap_.back();
        heap_.pop_back();
        return event;
    }

    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    void reserve(std::size_t capacity) { heap_.reserve(capacity); }

    /// Every pending event, in heap order (not sorted).
    std::span<const Event> pending() const noexcept { return heap_; }

private:
    static bool later(const Event& a, const Event& b) noexcept {
        return a.time > b.time || (a.time == b.time && a.sequence > b.sequence);
    }

    std::vector<Event> heap_;
    std::uint64_t next_sequence_ = 0;
};

} // namespace grpsis
