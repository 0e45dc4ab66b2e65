#pragma once

#include <string>
#include <vector>

#include "meshchain/graph.hpp"
#include "meshchain/kernel.hpp"
#include "meshchain/metrics.hpp"
#include "meshchain/placement.hpp"
#include "meshchain/protocol.hpp"

namespace meshchain {

struct TopologySpec {
    std::string file;       // non-empty: load this file, params ignored
    TopologyParams params;  // otherwise generate

    bool operator==(const TopologySpec&) const = default;
};

struct WorkloadSpec {
    std::string chaincode = "compensation";
    std::string function = "record";  // record | query_balance
    uint32_t tx_count = 100;
    std::string mode = "parallel";  // parallel | serial
    double start_time = 0.0;
    // per-tx: every tx records for its own participant (no MVCC
    // contention); shared: all txs touch one participant.
    std::string participants = "per-tx";
    std::string period = "p0";

    bool operator==(const WorkloadSpec&) const = default;
};

// One experiment configuration: everything a run needs, all of it
// serializable to the line-oriented config format.
struct Scenario {
    TopologySpec topology;
    std::string strategy = "basp";
    PlacementRequest placement;  // placement.seed == 0 derives from run seed
    int required_k = 1;
    OrdererConfig orderer;
    double endorse_timeout = 30.0;
    WorkloadSpec workload;
    CpuProfile cpu;
    MessageSizes sizes;
    MemoryModel memory;
    uint64_t seed = 1;
    double horizon = 0.0;  // 0: run to completion; else stop and pad windows

    // Throws ConfigError listing every violated field.
    void validate() const;
    bool operator==(const Scenario&) const = default;
};

struct SweepSpec {
    Scenario base;
    std::string axis;  // block_size | n_endorsers | placement
    std::vector<std::string> values;
    uint32_t seeds = 1;

    void validate() const;
    bool operator==(const SweepSpec&) const = default;
};

Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

SweepSpec parse_sweep(const std::string& text, const std::string& origin);
SweepSpec load_sweep(const std::string& path);
std::string serialize_sweep(const SweepSpec& sweep);

// Sets the swept field on a copy of the scenario.
Scenario apply_axis(const Scenario& base, const std::string& axis, const std::string& value);

}  // namespace meshchain
