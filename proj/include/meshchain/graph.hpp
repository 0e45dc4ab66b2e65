#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshchain/rng.hpp"

namespace meshchain {

using NodeIndex = uint32_t;

struct MeshNode {
    std::string id;
    bool host = false;
};

struct MeshLink {
    NodeIndex a = 0;
    NodeIndex b = 0;
    double capacity_bps = 0.0;
    double latency_s = 0.0;
    double background_bps = 0.0;

    double effective_bps() const { return capacity_bps - background_bps; }
};

// Undirected connected mesh graph. Nodes are kept sorted by id and links
// sorted by endpoint ids, which makes the on-disk form canonical.
class NetworkGraph {
public:
    NetworkGraph(std::vector<MeshNode> nodes, std::vector<MeshLink> links);

    size_t node_count() const { return nodes_.size(); }
    size_t link_count() const { return links_.size(); }
    const std::vector<MeshNode>& nodes() const { return nodes_; }
    const std::vector<MeshLink>& links() const { return links_; }

    const MeshNode& node(NodeIndex i) const { return nodes_[i]; }
    std::optional<NodeIndex> find(const std::string& id) const;
    NodeIndex require(const std::string& id) const;

    // Neighbor node indices, ascending (ids ascend with indices).
    const std::vector<NodeIndex>& neighbors(NodeIndex i) const { return adjacency_[i]; }
    const MeshLink& link_between(NodeIndex a, NodeIndex b) const;

    std::vector<NodeIndex> host_nodes() const;
    size_t degree(NodeIndex i) const { return adjacency_[i].size(); }
    bool connected() const;

    bool operator==(const NetworkGraph& other) const;

private:
    std::vector<MeshNode> nodes_;
    std::vector<MeshLink> links_;
    std::vector<std::vector<NodeIndex>> adjacency_;
    std::map<std::pair<NodeIndex, NodeIndex>, size_t> link_index_;
};

// Minimum-hop path from src to dst as a node sequence including both
// endpoints; among equal-hop paths the lexicographically smallest id
// sequence. src == dst yields an empty path.
std::vector<NodeIndex> route(const NetworkGraph& graph, NodeIndex src, NodeIndex dst);

// Seconds to move size_bytes along a node path: per-hop latencies plus
// one serialization term at the bottleneck effective capacity.
double transfer_time(const NetworkGraph& graph, const std::vector<NodeIndex>& path,
                     uint64_t size_bytes);

struct CentralityScores {
    std::vector<double> degree;       // degree / (n-1)
    std::vector<double> betweenness;  // unordered source-target pairs, endpoints excluded
};

std::vector<double> degree_centrality(const NetworkGraph& graph);
std::vector<double> betweenness_centrality(const NetworkGraph& graph);
CentralityScores centrality_scores(const NetworkGraph& graph);

// Link capacity model: log-normal solved from a mean and one quantile
// constraint (defaults: mean 13.6 Mbps with P(X <= 10 Mbps) = 0.60).
struct BandwidthModel {
    double mean_bps = 13.6e6;
    double quantile_bps = 10.0e6;
    double quantile_prob = 0.60;

    double mu() const;
    double sigma() const;
    double sample(Rng& rng) const;

    bool operator==(const BandwidthModel&) const = default;
};

struct LatencyModel {
    // "uniform": hop latency uniform in [min_s, max_s].
    // "bandwidth-scaled": slower links get proportionally longer latencies,
    // interpolating [min_s, max_s] by the link's capacity rank.
    std::string kind = "uniform";
    double min_s = 0.001;
    double max_s = 0.005;

    bool operator==(const LatencyModel&) const = default;
};

struct TopologyParams {
    uint32_t n_nodes = 85;
    double avg_degree = 4.5;
    BandwidthModel bandwidth;
    LatencyModel latency;
    double max_background_bps = 1736e3;  // busiest-hour per-link peak
    uint64_t seed = 1;
    uint32_t hosts = 0;  // 0 = mark no hosts; otherwise spread-select this many

    bool operator==(const TopologyParams&) const = default;
};

// Random geometric graph on the unit square; the connection radius is
// the m-th smallest pairwise distance with m = n*avg_degree/2, so the
// edge count hits the target exactly. Disconnected samples are
// redrawn a bounded number of times.
NetworkGraph generate_topology(const TopologyParams& params);

// Text format, line oriented:
//   node <id> [host]
//   link <a> <b> <capacity_bps> <latency_s> <background_bps>
// '#' starts a comment. Graphs save canonically, so save/load/save is
// byte-identical.
NetworkGraph load_topology(const std::string& path);
NetworkGraph parse_topology(const std::string& text, const std::string& origin);
std::string serialize_topology(const NetworkGraph& graph);
void save_topology(const NetworkGraph& graph, const std::string& path);

}  // namespace meshchain
