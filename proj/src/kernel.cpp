#include "meshchain/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "meshchain/errors.hpp"

namespace meshchain {

void CpuProfile::validate() const {
    if (cost_endorse < 0 || cost_validate_per_tx < 0 || cost_order_per_tx < 0 ||
        cost_client_per_response < 0) {
        throw ConfigError("cpu profile: costs must be >= 0");
    }
}

SimKernel::SimKernel(size_t n_nodes, double window_s)
    : window_s_(window_s),
      cpu_tail_(n_nodes, 0.0),
      depth_(n_nodes, 0),
      total_busy_(n_nodes, 0.0),
      timelines_(n_nodes) {
    if (window_s <= 0) throw ConfigError("kernel: window width must be > 0");
    for (auto& t : timelines_) t.window_s = window_s;
}

void SimKernel::schedule(double time, std::function<void()> fn) {
    if (time < clock_) throw SimError("kernel: scheduling into the past");
    queue_.push({time, next_seq_++, std::move(fn)});
}

void SimKernel::after(double delay, std::function<void()> fn) {
    if (delay < 0) throw SimError("kernel: negative delay");
    schedule(clock_ + delay, std::move(fn));
}

void SimKernel::record_busy(NodeIndex node, double start, double end) {
    if (end <= start) return;
    total_busy_[node] += end - start;
    auto& windows = timelines_[node].busy;
    size_t first = size_t(std::floor(start / window_s_));
    size_t last = size_t(std::floor((end - 1e-12) / window_s_));
    if (windows.size() <= last) windows.resize(last + 1, 0.0);
    for (size_t w = first; w <= last; ++w) {
        const double lo = std::max(start, double(w) * window_s_);
        const double hi = std::min(end, double(w + 1) * window_s_);
        windows[w] += hi - lo;
    }
}

void SimKernel::note_depth(NodeIndex node, double at) {
    auto& depths = timelines_[node].max_depth;
    size_t w = size_t(std::floor(at / window_s_));
    if (depths.size() <= w) depths.resize(w + 1, 0);
    depths[w] = std::max(depths[w], depth_[node]);
}

double SimKernel::occupy_cpu(NodeIndex node, double duration, std::function<void()> done) {
    if (duration < 0) throw SimError("kernel: negative cpu duration");
    const double start = std::max(clock_, cpu_tail_[node]);
    const double end = start + duration;
    cpu_tail_[node] = end;
    record_busy(node, start, end);
    depth_[node] += 1;
    note_depth(node, clock_);
    schedule(end, [this, node, done = std::move(done)] {
        depth_[node] -= 1;
        note_depth(node, clock_);
        if (done) done();
    });
    return end;
}

void SimKernel::run(std::optional<double> until) {
    while (!queue_.empty()) {
        const Event& top = queue_.top();
        if (until && top.time > *until) break;
        // Copy out before pop: the handler may push new events.
        std::function<void()> fn = top.fn;
        clock_ = top.time;
        queue_.pop();
        ++dispatched_;
        fn();
    }
    if (until && *until > clock_) clock_ = *until;
}

void SimKernel::extend_timelines(double horizon) {
    const size_t want = size_t(std::ceil(horizon / window_s_ - 1e-12));
    for (auto& t : timelines_) {
        if (t.busy.size() < want) t.busy.resize(want, 0.0);
        if (t.max_depth.size() < want) t.max_depth.resize(want, 0);
    }
}

}  // namespace meshchain
