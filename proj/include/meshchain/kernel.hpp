#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "meshchain/graph.hpp"

namespace meshchain {

// Per-role CPU service times, simulated seconds. Defaults keep the
// endorser the busiest role under a shared workload.
struct CpuProfile {
    double cost_endorse = 0.3;
    double cost_validate_per_tx = 0.13;
    double cost_order_per_tx = 0.05;
    double cost_client_per_response = 0.01;

    void validate() const;
    bool operator==(const CpuProfile&) const = default;
};

// Busy seconds accumulated per fixed-width window; fractions are
// busy / width.
struct UtilizationTimeline {
    double window_s = 1.0;
    std::vector<double> busy;         // indexed by window
    std::vector<uint32_t> max_depth;  // peak CPU queue length per window

    double fraction(size_t window) const {
        return window < busy.size() ? busy[window] / window_s : 0.0;
    }
    size_t windows() const { return busy.size(); }
};

// Deterministic discrete-event engine. Strictly single threaded; all
// "concurrency" is simulated-time overlap. Each node owns one FIFO
// CPU: occupy_cpu appends to its queue and the completion callback
// fires when the task's service finishes.
class SimKernel {
public:
    explicit SimKernel(size_t n_nodes, double window_s = 1.0);

    double now() const { return clock_; }
    uint64_t dispatched() const { return dispatched_; }
    bool drained() const { return queue_.empty(); }

    // Schedules fn at an absolute time (>= now, else SimError).
    void schedule(double time, std::function<void()> fn);
    void after(double delay, std::function<void()> fn);

    // Appends a task to the node's CPU queue; returns the completion
    // time = max(now, queue tail) + duration. done runs at completion.
    double occupy_cpu(NodeIndex node, double duration, std::function<void()> done = {});

    // Dispatches events in (time, seq) order until the queue drains or
    // the next event lies beyond `until` (clock then rests at `until`).
    void run(std::optional<double> until = {});

    uint32_t queue_depth(NodeIndex node) const { return depth_[node]; }
    double total_busy(NodeIndex node) const { return total_busy_[node]; }
    const UtilizationTimeline& timeline(NodeIndex node) const { return timelines_[node]; }
    size_t node_count() const { return timelines_.size(); }

    // Pads every timeline with idle windows up to `horizon` seconds.
    void extend_timelines(double horizon);

private:
    struct Event {
        double time;
        uint64_t seq;
        std::function<void()> fn;
        bool operator>(const Event& other) const {
            return time != other.time ? time > other.time : seq > other.seq;
        }
    };

    void record_busy(NodeIndex node, double start, double end);
    void note_depth(NodeIndex node, double at);

    double clock_ = 0.0;
    double window_s_;
    uint64_t next_seq_ = 0;
    uint64_t dispatched_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::vector<double> cpu_tail_;
    std::vector<uint32_t> depth_;
    std::vector<double> total_busy_;
    std::vector<UtilizationTimeline> timelines_;
};

}  // namespace meshchain
