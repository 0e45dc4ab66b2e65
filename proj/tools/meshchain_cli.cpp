#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "meshchain/errors.hpp"
#include "meshchain/metrics.hpp"
#include "meshchain/placement.hpp"
#include "meshchain/runner.hpp"
#include "meshchain/scenario.hpp"

namespace {

using namespace meshchain;

void print_rows(const std::vector<std::pair<std::string, std::string>>& rows,
                const std::string& format) {
    if (format == "csv") {
        std::cout << "metric,value\n";
        for (const auto& [k, v] : rows) std::cout << k << ',' << v << '\n';
        return;
    }
    size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) {
        std::cout << k << std::string(width - k.size() + 2, ' ') << v << '\n';
    }
}

void print_summary(const Summary& summary, const std::string& format) {
    if (format == "csv") {
        std::ostringstream buf;
        write_summary_csv(buf, summary);
        std::cout << buf.str();
    } else {
        std::cout << format_summary_table(summary);
    }
}

void print_placement(const Placement& p) {
    std::cout << "strategy " << p.strategy << ": orderer=" << p.roles.orderer << " endorsers=";
    for (size_t i = 0; i < p.roles.endorsers.size(); ++i) {
        if (i) std::cout << ',';
        std::cout << p.roles.endorsers[i];
    }
    std::cout << " committers=";
    for (size_t i = 0; i < p.roles.committers.size(); ++i) {
        if (i) std::cout << ',';
        std::cout << p.roles.committers[i];
    }
    std::cout << " client=" << p.roles.client << '\n';
}

int cmd_run(const std::string& file, bool seed_set, uint64_t seed, const std::string& out_dir,
            const std::string& format) {
    Scenario scenario = load_scenario(file);
    if (seed_set) scenario.seed = seed;
    RunOutput out = out_dir.empty() ? run_scenario(scenario) : run_scenario_to(scenario, out_dir);
    print_placement(out.placement);
    print_summary(out.summary, format);
    if (!out_dir.empty()) std::cout << "outputs written to " << out_dir << '\n';
    return 0;
}

int cmd_sweep(const std::string& file, bool seed_set, uint64_t seed, const std::string& out_dir,
              const std::string& format) {
    SweepSpec sweep = load_sweep(file);
    if (seed_set) sweep.base.seed = seed;
    SweepResult result =
        out_dir.empty() ? run_sweep(sweep) : run_sweep_to(sweep, out_dir);
    if (format == "csv") {
        std::cout << sweep_csv(sweep, result);
    } else {
        std::vector<std::pair<std::string, std::string>> rows;
        for (const auto& a : result.aggregates) {
            rows.emplace_back(sweep.axis + "=" + a.value,
                              "ttc " + format_seconds(a.ttc) + " s, mean latency " +
                                  format_seconds(a.mean_latency) + " s");
        }
        print_rows(rows, "table");
    }
    if (!out_dir.empty()) std::cout << "outputs written to " << out_dir << '\n';
    return 0;
}

int cmd_topology_gen(const TopologyParams& params, const std::string& out_file) {
    NetworkGraph graph = generate_topology(params);
    save_topology(graph, out_file);
    std::cout << "wrote " << out_file << ": " << graph.node_count() << " nodes, "
              << graph.link_count() << " links\n";
    return 0;
}

std::vector<std::pair<std::string, std::string>> topology_stats_rows(const NetworkGraph& graph) {
    double cap_sum = 0.0;
    double lat_sum = 0.0;
    size_t under_10m = 0;
    for (const auto& link : graph.links()) {
        cap_sum += link.capacity_bps;
        lat_sum += link.latency_s;
        if (link.capacity_bps <= 10e6) under_10m += 1;
    }
    const double n_links = double(graph.link_count());
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("nodes", std::to_string(graph.node_count()));
    rows.emplace_back("links", std::to_string(graph.link_count()));
    rows.emplace_back("hosts", std::to_string(graph.host_nodes().size()));
    rows.emplace_back("avg_degree",
                      format_seconds(2.0 * n_links / double(graph.node_count())));
    rows.emplace_back("mean_capacity_bps", format_seconds(cap_sum / n_links));
    rows.emplace_back("p_capacity_le_10mbps", format_seconds(double(under_10m) / n_links));
    rows.emplace_back("mean_latency_s", format_seconds(lat_sum / n_links));
    return rows;
}

int cmd_placement_compare(const std::string& topo_file, uint32_t endorsers, uint32_t committers,
                          const std::string& client, uint64_t seed, const std::string& format) {
    NetworkGraph graph = load_topology(topo_file);
    PlacementRequest request;
    request.n_endorsers = endorsers;
    request.n_committers = committers;
    request.client_id = client;
    request.seed = seed;
    for (const char* strategy : {"basp", "random", "betweenness"}) {
        print_placement(make_placement(graph, strategy, request));
    }
    const Placement basp = make_placement(graph, "basp", request);
    if (format == "csv") {
        std::cout << "node,bw_norm,deg_norm,score\n";
        for (const auto& s : basp.scores) {
            std::cout << s.id << ',' << format_seconds(s.bw_norm) << ','
                      << format_seconds(s.deg_norm) << ',' << format_seconds(s.score) << '\n';
        }
    } else {
        std::vector<std::pair<std::string, std::string>> rows;
        for (const auto& s : basp.scores) {
            rows.emplace_back(s.id, "score " + format_seconds(s.score) + " (bw " +
                                        format_seconds(s.bw_norm) + ", deg " +
                                        format_seconds(s.deg_norm) + ")");
        }
        print_rows(rows, "table");
    }
    return 0;
}

int cmd_report(const std::string& dir, const std::string& format) {
    namespace fs = std::filesystem;
    bool printed = false;
    for (const char* name : {"sweep.csv", "summary.csv"}) {
        const fs::path path = fs::path(dir) / name;
        if (!fs::exists(path)) continue;
        std::ifstream in(path);
        std::string line;
        std::cout << "# " << path.string() << '\n';
        while (std::getline(in, line)) {
            if (format == "csv") {
                std::cout << line << '\n';
            } else {
                std::string pretty = line;
                std::replace(pretty.begin(), pretty.end(), ',', '\t');
                std::cout << pretty << '\n';
            }
        }
        printed = true;
    }
    if (!printed) throw ConfigError("report: no sweep.csv or summary.csv under " + dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"execute-order-validate blockchain simulator on a wireless mesh network"};
    app.require_subcommand(1);

    std::string scenario_file, sweep_file, out_dir, format = "table";
    uint64_t seed = 1;
    bool seed_set = false;

    const auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "table"}));
        if (with_seed) {
            cmd->add_option("--seed", seed, "override the run seed")
                ->each([&](const std::string&) { seed_set = true; });
        }
    };

    auto* run_cmd = app.add_subcommand("run", "run one scenario file");
    run_cmd->add_option("scenario", scenario_file, "scenario file")->required();
    add_common(run_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep file");
    sweep_cmd->add_option("sweep", sweep_file, "sweep file")->required();
    add_common(sweep_cmd);

    auto* topo_cmd = app.add_subcommand("topology", "topology tools");
    topo_cmd->require_subcommand(1);
    TopologyParams gen_params;
    std::string topo_out = "topology.topo";
    auto* gen_cmd = topo_cmd->add_subcommand("gen", "generate a mesh topology");
    gen_cmd->add_option("--nodes", gen_params.n_nodes, "node count");
    gen_cmd->add_option("--avg-degree", gen_params.avg_degree, "target average degree");
    gen_cmd->add_option("--hosts", gen_params.hosts, "host nodes to mark");
    gen_cmd->add_option("--seed", gen_params.seed, "generator seed");
    gen_cmd->add_option("--latency-kind", gen_params.latency.kind,
                        "uniform | bandwidth-scaled");
    gen_cmd->add_option("--out", topo_out, "output file");

    std::string topo_file;
    auto* stats_cmd = topo_cmd->add_subcommand("stats", "print topology statistics");
    stats_cmd->add_option("file", topo_file, "topology file")->required();
    stats_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "table"}));

    auto* validate_cmd = topo_cmd->add_subcommand("validate", "check a topology file");
    validate_cmd->add_option("file", topo_file, "topology file")->required();

    auto* place_cmd = app.add_subcommand("placement", "placement tools");
    place_cmd->require_subcommand(1);
    auto* compare_cmd = place_cmd->add_subcommand("compare", "compare placement strategies");
    std::string place_topo, place_client;
    uint32_t place_endorsers = 1, place_committers = 1;
    uint64_t place_seed = 1;
    compare_cmd->add_option("file", place_topo, "topology file")->required();
    compare_cmd->add_option("--endorsers", place_endorsers, "endorser count");
    compare_cmd->add_option("--committers", place_committers, "committer-only count");
    compare_cmd->add_option("--client", place_client, "client node id");
    compare_cmd->add_option("--seed", place_seed, "random strategy seed");
    compare_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "table"}));

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "print results from an output directory");
    report_cmd->add_option("dir", report_dir, "output directory")->required();
    report_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "table"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(run_cmd)) {
            return cmd_run(scenario_file, seed_set, seed, out_dir, format);
        }
        if (app.got_subcommand(sweep_cmd)) {
            return cmd_sweep(sweep_file, seed_set, seed, out_dir, format);
        }
        if (topo_cmd->got_subcommand(gen_cmd)) return cmd_topology_gen(gen_params, topo_out);
        if (topo_cmd->got_subcommand(stats_cmd)) {
            print_rows(topology_stats_rows(load_topology(topo_file)), format);
            return 0;
        }
        if (topo_cmd->got_subcommand(validate_cmd)) {
            NetworkGraph graph = load_topology(topo_file);
            std::cout << topo_file << " ok: " << graph.node_count() << " nodes, "
                      << graph.link_count() << " links, " << graph.host_nodes().size()
                      << " hosts\n";
            return 0;
        }
        if (place_cmd->got_subcommand(compare_cmd)) {
            return cmd_placement_compare(place_topo, place_endorsers, place_committers,
                                         place_client, place_seed, format);
        }
        if (app.got_subcommand(report_cmd)) return cmd_report(report_dir, format);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
