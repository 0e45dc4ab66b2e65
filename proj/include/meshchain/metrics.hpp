#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "meshchain/protocol.hpp"

namespace meshchain {

// Per-node timelines labeled with the node's primary role.
struct NodeUsage {
    std::string node;
    std::string role;  // client | endorser | committer | orderer
    std::vector<double> busy_fraction;
    std::vector<double> mem_fraction;
};

struct RunMetrics {
    std::vector<TxRecord> tx_records;
    std::vector<NodeUsage> usage;
    uint64_t blocks_cut = 0;
    double end_time = 0.0;
};

struct Summary {
    uint64_t proposed = 0;
    uint64_t committed_valid = 0;
    uint64_t committed_invalid = 0;
    uint64_t rejected = 0;
    uint64_t blocks_cut = 0;
    // Absent when no tx committed.
    std::optional<double> ttc;
    std::optional<double> mean_latency;
    std::optional<double> median_latency;
    std::optional<double> p95_latency;
    std::map<std::string, double> peak_cpu;  // per role
};

// Derived memory occupancy: a per-role base plus a per-queued-item
// increment, capped. Reported only; never a constraint.
struct MemoryModel {
    double base_client = 0.55;
    double base_endorser = 0.60;
    double base_committer = 0.57;
    double base_orderer = 0.57;
    double per_item_client = 0.0002;
    double per_item_endorser = 0.0005;
    double per_item_committer = 0.002;
    double per_item_orderer = 0.001;
    double cap = 0.95;

    double fraction(const std::string& role, uint32_t queue_depth) const;
    bool operator==(const MemoryModel&) const = default;
};

// TTC = max t_committed - min t_proposed over committed txs; per-tx
// latency = t_committed - t_proposed; role peaks over all windows.
Summary summarize(const RunMetrics& metrics);

// Relative gain of b over baseline a: (mean_a - mean_b) / mean_a.
double compare(const Summary& a, const Summary& b);

void write_tx_records_csv(std::ostream& out, const std::vector<TxRecord>& records);
void write_utilization_csv(std::ostream& out, const std::vector<NodeUsage>& usage);
void write_memory_csv(std::ostream& out, const std::vector<NodeUsage>& usage);
void write_summary_csv(std::ostream& out, const Summary& summary);

std::string format_summary_table(const Summary& summary);

// Fixed 6-decimal formatting used by every CSV emitter (byte-stable
// across runs).
std::string format_seconds(double v);

}  // namespace meshchain
