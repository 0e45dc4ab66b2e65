#include "meshchain/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "meshchain/errors.hpp"
#include "meshchain/svg.hpp"

namespace meshchain {

namespace {

Bytes str_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

TxProposal workload_proposal(const WorkloadSpec& w, uint32_t i) {
    char id[32];
    std::snprintf(id, sizeof(id), "tx%04u", i);
    char part[32];
    std::snprintf(part, sizeof(part), "p%03u", i);
    const std::string participant = w.participants == "shared" ? "alice" : part;

    TxProposal p;
    p.tx_id = id;
    p.chaincode_id = w.chaincode;
    p.function = w.function;
    if (w.function == "record") {
        const char* kind = i % 2 == 0 ? "contribution" : "consumption";
        p.args = {str_bytes(participant), str_bytes(kind), str_bytes(std::to_string(1 + i % 10)),
                  str_bytes("1000000"), str_bytes(w.period)};
    } else {
        p.args = {str_bytes(participant), str_bytes(w.period)};
    }
    return p;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError("cannot write " + path);
    out << content;
}

}  // namespace

RunOutput run_scenario(const Scenario& scenario) {
    scenario.validate();
    const NetworkGraph graph = scenario.topology.file.empty()
                                   ? generate_topology(scenario.topology.params)
                                   : load_topology(scenario.topology.file);

    PlacementRequest request = scenario.placement;
    if (request.seed == 0) request.seed = scenario.seed;
    Placement placement = make_placement(graph, scenario.strategy, request);
    const RoleAssignment& roles = placement.roles;

    EndorsementPolicy policy;
    for (const auto& id : roles.endorsers) policy.endorser_set.insert(id);
    policy.required_k = scenario.required_k;

    SimKernel kernel(graph.node_count());
    ProtocolEngine engine(kernel, graph, roles, policy, scenario.cpu, scenario.sizes,
                          scenario.orderer, default_registry(), scenario.endorse_timeout);

    const WorkloadSpec& w = scenario.workload;
    if (w.mode == "parallel") {
        for (uint32_t i = 0; i < w.tx_count; ++i) {
            kernel.schedule(w.start_time, [&engine, &w, i] {
                engine.propose(workload_proposal(w, i));
            });
        }
    } else if (w.tx_count > 0) {
        auto issued = std::make_shared<uint32_t>(0);
        engine.on_terminal([&engine, &kernel, &w, issued](const TxRecord&) {
            *issued += 1;
            const uint32_t next = *issued;
            if (next >= w.tx_count) return;
            kernel.schedule(kernel.now(), [&engine, &w, next] {
                engine.propose(workload_proposal(w, next));
            });
        });
        kernel.schedule(w.start_time, [&engine, &w] { engine.propose(workload_proposal(w, 0)); });
    }

    if (scenario.horizon > 0) {
        kernel.run(scenario.horizon);
        kernel.extend_timelines(scenario.horizon);
    } else {
        kernel.run();
    }

    // Replica agreement and chain integrity are cheap; check on every
    // completed run.
    if (kernel.drained()) {
        const Bytes reference = engine.reference_ledger().canonical();
        for (const auto& id : roles.committers) {
            if (engine.replica(id).canonical() != reference) {
                throw SimError("run: committer replicas diverged");
            }
        }
        if (!verify_chain(engine.reference_ledger(), policy)) {
            throw SimError("run: reference ledger failed chain verification");
        }
    }

    // Per-node primary role, most specific last: committer < endorser <
    // orderer; the client label only survives on a service-free node.
    std::map<std::string, std::string> role_of;
    role_of[roles.client] = "client";
    for (const auto& id : roles.committers) role_of[id] = "committer";
    for (const auto& id : roles.endorsers) role_of[id] = "endorser";
    role_of[roles.orderer] = "orderer";

    size_t windows = 0;
    for (const auto& [id, role] : role_of) {
        windows = std::max(windows, kernel.timeline(graph.require(id)).windows());
    }
    if (scenario.horizon > 0) {
        // Queued work may extend timelines past the cutoff; report only
        // windows inside the horizon.
        windows = size_t(std::ceil(scenario.horizon / kernel.timeline(0).window_s));
    }

    RunOutput out;
    out.placement = std::move(placement);
    out.metrics.tx_records = engine.records();
    out.metrics.blocks_cut = engine.blocks_cut();
    out.metrics.end_time = kernel.now();
    for (const auto& [id, role] : role_of) {
        const UtilizationTimeline& t = kernel.timeline(graph.require(id));
        NodeUsage usage;
        usage.node = id;
        usage.role = role;
        usage.busy_fraction.resize(windows, 0.0);
        usage.mem_fraction.resize(windows, 0.0);
        for (size_t wdx = 0; wdx < windows; ++wdx) {
            usage.busy_fraction[wdx] = t.fraction(wdx);
            const uint32_t depth = wdx < t.max_depth.size() ? t.max_depth[wdx] : 0;
            usage.mem_fraction[wdx] = scenario.memory.fraction(role, depth);
        }
        out.metrics.usage.push_back(std::move(usage));
    }
    out.summary = summarize(out.metrics);
    return out;
}

RunOutput run_scenario_to(const Scenario& scenario, const std::string& out_dir) {
    RunOutput out = run_scenario(scenario);
    std::filesystem::create_directories(out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    {
        std::ostringstream buf;
        write_tx_records_csv(buf, out.metrics.tx_records);
        write_file(path("tx_records.csv"), buf.str());
    }
    {
        std::ostringstream buf;
        write_utilization_csv(buf, out.metrics.usage);
        write_file(path("utilization.csv"), buf.str());
    }
    {
        std::ostringstream buf;
        write_memory_csv(buf, out.metrics.usage);
        write_file(path("memory.csv"), buf.str());
    }
    {
        std::ostringstream buf;
        write_summary_csv(buf, out.summary);
        write_file(path("summary.csv"), buf.str());
    }
    return out;
}

namespace {

SweepResult run_sweep_impl(const SweepSpec& sweep, const std::string* out_dir) {
    sweep.validate();
    if (out_dir) std::filesystem::create_directories(*out_dir);

    SweepResult result;
    for (const auto& value : sweep.values) {
        const Scenario with_value = apply_axis(sweep.base, sweep.axis, value);
        SweepAggregate agg;
        agg.value = value;
        size_t with_latency = 0;
        for (uint32_t si = 0; si < sweep.seeds; ++si) {
            Scenario point = with_value;
            point.seed = sweep.base.seed + si;
            RunOutput out;
            try {
                if (out_dir) {
                    const std::string dir =
                        (std::filesystem::path(*out_dir) /
                         (sweep.axis + "-" + value + "-seed" + std::to_string(point.seed)))
                            .string();
                    out = run_scenario_to(point, dir);
                } else {
                    out = run_scenario(point);
                }
            } catch (const std::exception& e) {
                throw SimError("sweep point " + sweep.axis + "=" + value + " seed " +
                               std::to_string(point.seed) + " failed: " + e.what());
            }
            const Summary& s = out.summary;
            result.points.push_back({value, point.seed, s});
            agg.committed += double(s.committed_valid + s.committed_invalid);
            agg.rejected += double(s.rejected);
            if (s.ttc) {
                agg.ttc += *s.ttc;
                agg.mean_latency += *s.mean_latency;
                agg.median_latency += *s.median_latency;
                agg.p95_latency += *s.p95_latency;
                with_latency += 1;
            }
        }
        agg.committed /= double(sweep.seeds);
        agg.rejected /= double(sweep.seeds);
        if (with_latency > 0) {
            agg.ttc /= double(with_latency);
            agg.mean_latency /= double(with_latency);
            agg.median_latency /= double(with_latency);
            agg.p95_latency /= double(with_latency);
        }
        result.aggregates.push_back(std::move(agg));
    }

    if (out_dir) {
        write_file((std::filesystem::path(*out_dir) / "sweep.csv").string(),
                   sweep_csv(sweep, result));
        write_file((std::filesystem::path(*out_dir) / "chart.svg").string(),
                   sweep_chart_svg(sweep, result));
    }
    return result;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& sweep) { return run_sweep_impl(sweep, nullptr); }

SweepResult run_sweep_to(const SweepSpec& sweep, const std::string& out_dir) {
    return run_sweep_impl(sweep, &out_dir);
}

std::string sweep_csv(const SweepSpec& sweep, const SweepResult& result) {
    std::ostringstream out;
    out << "axis,value,seed,ttc_s,mean_latency_s,median_latency_s,p95_latency_s,"
        << "committed,rejected\n";
    const auto opt = [](const std::optional<double>& v) {
        return v ? format_seconds(*v) : std::string();
    };
    for (const auto& p : result.points) {
        out << sweep.axis << ',' << p.value << ',' << p.seed << ',' << opt(p.summary.ttc) << ','
            << opt(p.summary.mean_latency) << ',' << opt(p.summary.median_latency) << ','
            << opt(p.summary.p95_latency) << ','
            << p.summary.committed_valid + p.summary.committed_invalid << ','
            << p.summary.rejected << '\n';
    }
    for (const auto& a : result.aggregates) {
        out << sweep.axis << ',' << a.value << ",mean," << format_seconds(a.ttc) << ','
            << format_seconds(a.mean_latency) << ',' << format_seconds(a.median_latency) << ','
            << format_seconds(a.p95_latency) << ',' << format_seconds(a.committed) << ','
            << format_seconds(a.rejected) << '\n';
    }
    return out.str();
}

std::string sweep_chart_svg(const SweepSpec& sweep, const SweepResult& result) {
    const bool categorical = sweep.axis == "placement";
    const bool use_latency = categorical;

    ChartSpec spec;
    spec.title = "sweep over " + sweep.axis;
    spec.x_label = sweep.axis;
    spec.y_label = use_latency ? "mean latency (s)" : "TTC (s)";

    ChartSeries series;
    series.label = "mean over " + std::to_string(sweep.seeds) + " seeds";
    for (size_t i = 0; i < result.aggregates.size(); ++i) {
        const SweepAggregate& a = result.aggregates[i];
        double x = double(i);
        if (!categorical) {
            double parsed = 0.0;
            auto [ptr, ec] =
                std::from_chars(a.value.data(), a.value.data() + a.value.size(), parsed);
            x = ec == std::errc() ? parsed : double(i);
        }
        series.points.emplace_back(x, use_latency ? a.mean_latency : a.ttc);
    }
    if (categorical) {
        for (const auto& a : result.aggregates) spec.x_tick_labels.push_back(a.value);
    }
    return render_line_chart(spec, {series});
}

}  // namespace meshchain
