#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "meshchain/errors.hpp"
#include "meshchain/runner.hpp"
#include "meshchain/scenario.hpp"

using namespace meshchain;
namespace fs = std::filesystem;

namespace {

Scenario small_scenario() {
    Scenario s;
    s.topology.params.n_nodes = 8;
    s.topology.params.avg_degree = 3.0;
    s.topology.params.seed = 4;
    s.placement.n_endorsers = 1;
    s.placement.n_committers = 1;
    s.orderer.block_size = 2;
    s.orderer.batch_timeout = 1.0;
    s.workload.tx_count = 5;
    s.seed = 1;
    return s;
}

std::string run_csv_bundle(const Scenario& s) {
    const RunOutput out = run_scenario(s);
    std::ostringstream buf;
    write_tx_records_csv(buf, out.metrics.tx_records);
    write_utilization_csv(buf, out.metrics.usage);
    write_memory_csv(buf, out.metrics.usage);
    write_summary_csv(buf, out.summary);
    return buf.str();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("a full run commits every transaction and cuts the expected blocks") {
    const RunOutput out = run_scenario(small_scenario());
    CHECK(out.summary.proposed == 5);
    CHECK(out.summary.committed_valid == 5);
    CHECK(out.summary.rejected == 0);
    CHECK(out.summary.blocks_cut == 3);
    REQUIRE(out.summary.ttc.has_value());
    CHECK(*out.summary.ttc > 0.0);
    CHECK(out.placement.roles.client != out.placement.roles.orderer);
}

TEST_CASE("an empty workload produces an empty run") {
    Scenario s = small_scenario();
    s.workload.tx_count = 0;
    const RunOutput out = run_scenario(s);
    CHECK(out.summary.proposed == 0);
    CHECK(out.summary.blocks_cut == 0);
    CHECK_FALSE(out.summary.ttc.has_value());

    s.workload.mode = "serial";
    CHECK(run_scenario(s).summary.proposed == 0);
}

TEST_CASE("usage covers each distinct role with equal-length windows") {
    const RunOutput out = run_scenario(small_scenario());
    REQUIRE_FALSE(out.metrics.usage.empty());
    const size_t windows = out.metrics.usage.front().busy_fraction.size();
    CHECK(windows > 0);
    std::set<std::string> roles;
    for (const auto& u : out.metrics.usage) {
        roles.insert(u.role);
        CHECK(u.busy_fraction.size() == windows);
        CHECK(u.mem_fraction.size() == windows);
        for (double f : u.busy_fraction) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
        for (double f : u.mem_fraction) {
            CHECK(f >= 0.5);
            CHECK(f <= 0.95);
        }
    }
    CHECK(roles.count("endorser") == 1);
    CHECK(roles.count("orderer") == 1);
    CHECK(roles.count("committer") == 1);
}

TEST_CASE("identical scenarios produce byte-identical outputs") {
    const Scenario s = small_scenario();
    CHECK(run_csv_bundle(s) == run_csv_bundle(s));
}

TEST_CASE("serial mode issues each transaction after the previous one finishes") {
    Scenario s = small_scenario();
    s.workload.mode = "serial";
    s.workload.tx_count = 4;
    s.orderer.block_size = 1;
    const RunOutput out = run_scenario(s);
    REQUIRE(out.metrics.tx_records.size() == 4);
    for (size_t i = 0; i + 1 < out.metrics.tx_records.size(); ++i) {
        const TxRecord& prev = out.metrics.tx_records[i];
        const TxRecord& next = out.metrics.tx_records[i + 1];
        REQUIRE(prev.t_notified.has_value());
        CHECK(next.t_proposed >= *prev.t_notified);
    }
}

TEST_CASE("a horizon stops the run and pads utilization windows") {
    Scenario s = small_scenario();
    s.cpu.cost_endorse = 10.0;
    s.horizon = 3.0;
    const RunOutput out = run_scenario(s);
    CHECK(out.summary.proposed == 5);
    CHECK(out.summary.committed_valid == 0);
    CHECK_FALSE(out.summary.ttc.has_value());
    CHECK(out.metrics.end_time <= 3.0 + 1e-9);
    for (const auto& u : out.metrics.usage) CHECK(u.busy_fraction.size() == 3);
}

TEST_CASE("placement seed zero derives from the run seed") {
    Scenario a = small_scenario();
    a.strategy = "random";
    a.placement.seed = 0;
    a.seed = 5;

    Scenario b = small_scenario();
    b.strategy = "random";
    b.placement.seed = 5;
    b.seed = 999;

    const RunOutput ra = run_scenario(a);
    const RunOutput rb = run_scenario(b);
    CHECK(ra.placement.roles.orderer == rb.placement.roles.orderer);
    CHECK(ra.placement.roles.endorsers == rb.placement.roles.endorsers);
    CHECK(ra.placement.roles.client == rb.placement.roles.client);
}

TEST_CASE("run outputs land in the requested directory and match the writers") {
    const fs::path dir = fs::temp_directory_path() / "meshchain_runner_out";
    fs::remove_all(dir);
    const Scenario s = small_scenario();
    const RunOutput out = run_scenario_to(s, dir.string());

    std::ostringstream tx, util, mem, summary;
    write_tx_records_csv(tx, out.metrics.tx_records);
    write_utilization_csv(util, out.metrics.usage);
    write_memory_csv(mem, out.metrics.usage);
    write_summary_csv(summary, out.summary);

    CHECK(slurp(dir / "tx_records.csv") == tx.str());
    CHECK(slurp(dir / "utilization.csv") == util.str());
    CHECK(slurp(dir / "memory.csv") == mem.str());
    CHECK(slurp(dir / "summary.csv") == summary.str());
    fs::remove_all(dir);
}

TEST_CASE("a sweep runs every value and seed and aggregates per value") {
    SweepSpec sweep;
    sweep.base = small_scenario();
    sweep.axis = "block_size";
    sweep.values = {"1", "5"};
    sweep.seeds = 2;
    const SweepResult result = run_sweep(sweep);
    REQUIRE(result.points.size() == 4);
    REQUIRE(result.aggregates.size() == 2);
    CHECK(result.points[0].seed == 1);
    CHECK(result.points[1].seed == 2);
    CHECK(result.aggregates[0].value == "1");
    CHECK(result.aggregates[1].value == "5");
    CHECK(result.aggregates[0].committed == doctest::Approx(5.0));

    const std::string csv = sweep_csv(sweep, result);
    CHECK(csv.rfind("axis,value,seed,ttc_s,mean_latency_s,median_latency_s,p95_latency_s,"
                    "committed,rejected\n",
                    0) == 0);
    CHECK(csv.find("block_size,1,mean,") != std::string::npos);
    CHECK(csv.find("block_size,5,mean,") != std::string::npos);
}

TEST_CASE("a single-value sweep equals the direct run") {
    SweepSpec sweep;
    sweep.base = small_scenario();
    sweep.axis = "block_size";
    sweep.values = {"2"};
    const SweepResult result = run_sweep(sweep);
    REQUIRE(result.points.size() == 1);
    const RunOutput direct = run_scenario(sweep.base);
    CHECK(result.points[0].summary.ttc == direct.summary.ttc);
    CHECK(result.aggregates[0].ttc == doctest::Approx(*direct.summary.ttc));
}

TEST_CASE("a failing sweep point names its axis value and seed") {
    SweepSpec sweep;
    sweep.base = small_scenario();
    sweep.axis = "n_endorsers";
    sweep.values = {"1", "8"};
    try {
        run_sweep(sweep);
        FAIL("expected SimError");
    } catch (const SimError& e) {
        CHECK(std::string(e.what()).rfind("sweep point n_endorsers=8 seed 1 failed: ", 0) == 0);
    }
}

TEST_CASE("sweep charts render an svg with one point per value") {
    SweepSpec sweep;
    sweep.base = small_scenario();
    sweep.axis = "block_size";
    sweep.values = {"1", "5"};
    const SweepResult result = run_sweep(sweep);
    const std::string svg = sweep_chart_svg(sweep, result);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("TTC (s)") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
