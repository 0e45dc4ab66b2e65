#pragma once

#include <string>
#include <vector>

#include "meshchain/metrics.hpp"
#include "meshchain/scenario.hpp"

namespace meshchain {

struct RunOutput {
    Placement placement;
    RunMetrics metrics;
    Summary summary;
};

// Executes one scenario on a fresh kernel. Deterministic per scenario
// content (the run seed is part of it).
RunOutput run_scenario(const Scenario& scenario);

// run_scenario plus tx_records.csv, utilization.csv, memory.csv and
// summary.csv under out_dir (created if missing).
RunOutput run_scenario_to(const Scenario& scenario, const std::string& out_dir);

struct SweepPoint {
    std::string value;
    uint64_t seed = 0;
    Summary summary;
};

// Mean over the seeds of one axis value (only points that committed
// transactions contribute to the latency fields).
struct SweepAggregate {
    std::string value;
    double ttc = 0.0;
    double mean_latency = 0.0;
    double median_latency = 0.0;
    double p95_latency = 0.0;
    double committed = 0.0;
    double rejected = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<SweepAggregate> aggregates;
};

SweepResult run_sweep(const SweepSpec& sweep);
// Adds per-point output directories plus sweep.csv and chart.svg.
SweepResult run_sweep_to(const SweepSpec& sweep, const std::string& out_dir);

std::string sweep_csv(const SweepSpec& sweep, const SweepResult& result);
std::string sweep_chart_svg(const SweepSpec& sweep, const SweepResult& result);

}  // namespace meshchain
