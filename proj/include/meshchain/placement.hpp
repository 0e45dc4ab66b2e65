#pragma once

#include <string>
#include <vector>

#include "meshchain/graph.hpp"

namespace meshchain {

// Which node plays which protocol role. Committers hold ledger
// replicas; every endorser is also a committer, and the tail of
// `committers` lists the committer-only nodes. The reference committer
// is the replica whose commit stamps t_committed and emits the client
// notifications.
struct RoleAssignment {
    std::string client;
    std::string orderer;
    std::vector<std::string> endorsers;
    std::vector<std::string> committers;
    std::string reference_committer;

    bool is_endorser(const std::string& id) const;
    bool is_committer(const std::string& id) const;
    void validate(const NetworkGraph& graph) const;
};

struct NodeScore {
    std::string id;
    double bw_norm = 0.0;   // node bandwidth / max over candidates
    double deg_norm = 0.0;  // degree centrality / max over candidates
    double score = 0.0;     // (bw_norm + deg_norm) / 2
};

struct PlacementRequest {
    uint32_t n_endorsers = 1;
    uint32_t n_committers = 1;  // committer-only nodes beyond the endorsers
    std::string client_id;      // empty: lowest-scored candidate
    uint64_t seed = 1;          // consumed by the random strategy only

    bool operator==(const PlacementRequest&) const = default;
};

struct Placement {
    std::string strategy;
    RoleAssignment roles;
    std::vector<NodeScore> scores;  // candidates, descending score
};

// Sum of effective capacities (capacity - background) incident to node.
double node_bandwidth(const NetworkGraph& graph, NodeIndex node);

// Host-marked nodes when the topology marks any, otherwise all nodes.
std::vector<NodeIndex> candidate_pool(const NetworkGraph& graph);

// Candidate scores under max-normalization, sorted by score descending
// (ties by id ascending).
std::vector<NodeScore> score_candidates(const NetworkGraph& graph,
                                        const std::vector<NodeIndex>& candidates);

Placement place_basp(const NetworkGraph& graph, const PlacementRequest& request,
                     const std::vector<NodeIndex>& candidates);
Placement place_random(const NetworkGraph& graph, const PlacementRequest& request,
                       const std::vector<NodeIndex>& candidates);
Placement place_betweenness(const NetworkGraph& graph, const PlacementRequest& request,
                            const std::vector<NodeIndex>& candidates);

// Dispatch by strategy name: "basp" | "random" | "betweenness".
// Empty candidate list means candidate_pool(graph).
Placement make_placement(const NetworkGraph& graph, const std::string& strategy,
                         const PlacementRequest& request,
                         std::vector<NodeIndex> candidates = {});

}  // namespace meshchain
