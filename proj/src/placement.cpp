#include "meshchain/placement.hpp"

#include <algorithm>

#include "meshchain/errors.hpp"
#include "meshchain/rng.hpp"

namespace meshchain {

bool RoleAssignment::is_endorser(const std::string& id) const {
    return std::find(endorsers.begin(), endorsers.end(), id) != endorsers.end();
}

bool RoleAssignment::is_committer(const std::string& id) const {
    return std::find(committers.begin(), committers.end(), id) != committers.end();
}

void RoleAssignment::validate(const NetworkGraph& graph) const {
    graph.require(client);
    graph.require(orderer);
    if (endorsers.empty()) throw ConfigError("role assignment: no endorsers");
    for (const auto& id : endorsers) {
        graph.require(id);
        if (!is_committer(id)) {
            throw ConfigError("role assignment: endorser " + id + " holds no ledger replica");
        }
    }
    for (const auto& id : committers) graph.require(id);
    if (!is_committer(reference_committer)) {
        throw ConfigError("role assignment: reference committer not a committer");
    }
}

double node_bandwidth(const NetworkGraph& graph, NodeIndex node) {
    double total = 0.0;
    for (NodeIndex peer : graph.neighbors(node)) {
        total += graph.link_between(node, peer).effective_bps();
    }
    return total;
}

std::vector<NodeIndex> candidate_pool(const NetworkGraph& graph) {
    std::vector<NodeIndex> hosts = graph.host_nodes();
    if (!hosts.empty()) return hosts;
    std::vector<NodeIndex> all(graph.node_count());
    for (size_t i = 0; i < all.size(); ++i) all[i] = NodeIndex(i);
    return all;
}

std::vector<NodeScore> score_candidates(const NetworkGraph& graph,
                                        const std::vector<NodeIndex>& candidates) {
    if (candidates.empty()) throw ConfigError("placement: empty candidate set");
    std::vector<double> bw(candidates.size());
    std::vector<double> deg(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        bw[i] = node_bandwidth(graph, candidates[i]);
        deg[i] = double(graph.degree(candidates[i]));
    }
    const double bw_max = *std::max_element(bw.begin(), bw.end());
    const double deg_max = *std::max_element(deg.begin(), deg.end());

    std::vector<NodeScore> scores(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        NodeScore& s = scores[i];
        s.id = graph.node(candidates[i]).id;
        s.bw_norm = bw_max > 0 ? bw[i] / bw_max : 0.0;
        s.deg_norm = deg_max > 0 ? deg[i] / deg_max : 0.0;
        s.score = (s.bw_norm + s.deg_norm) / 2.0;
    }
    std::sort(scores.begin(), scores.end(), [](const NodeScore& a, const NodeScore& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    return scores;
}

namespace {

// Shared assembly: given candidate ids in selection order (best first),
// fix the client, then fill orderer / endorsers / committer-only slots
// from the front.
Placement assemble(std::string strategy, const PlacementRequest& request,
                   std::vector<std::string> ranked, std::vector<NodeScore> scores) {
    std::string client = request.client_id;
    if (client.empty()) {
        // Unspecified client goes to the weakest-scored candidate so
        // strategy comparisons vary only the service placement.
        client = scores.back().id;
    }
    std::erase(ranked, client);

    const size_t need = size_t(1) + request.n_endorsers + request.n_committers;
    if (ranked.size() < need) {
        throw ConfigError("placement: need " + std::to_string(need) +
                          " candidates besides the client, have " +
                          std::to_string(ranked.size()));
    }
    if (request.n_endorsers == 0) throw ConfigError("placement: n_endorsers must be >= 1");

    Placement p;
    p.strategy = std::move(strategy);
    p.scores = std::move(scores);
    p.roles.client = client;
    p.roles.orderer = ranked[0];
    size_t at = 1;
    for (uint32_t i = 0; i < request.n_endorsers; ++i) {
        p.roles.endorsers.push_back(ranked[at++]);
    }
    p.roles.committers = p.roles.endorsers;
    for (uint32_t i = 0; i < request.n_committers; ++i) {
        p.roles.committers.push_back(ranked[at++]);
    }
    p.roles.reference_committer = request.n_committers > 0
                                      ? p.roles.committers[request.n_endorsers]
                                      : p.roles.committers.front();
    return p;
}

std::vector<std::string> ids_of(const NetworkGraph& graph,
                                const std::vector<NodeIndex>& candidates) {
    std::vector<std::string> ids;
    ids.reserve(candidates.size());
    for (NodeIndex i : candidates) ids.push_back(graph.node(i).id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

Placement place_basp(const NetworkGraph& graph, const PlacementRequest& request,
                     const std::vector<NodeIndex>& candidates) {
    std::vector<NodeScore> scores = score_candidates(graph, candidates);
    std::vector<std::string> ranked;
    ranked.reserve(scores.size());
    for (const auto& s : scores) ranked.push_back(s.id);
    return assemble("basp", request, std::move(ranked), std::move(scores));
}

Placement place_betweenness(const NetworkGraph& graph, const PlacementRequest& request,
                            const std::vector<NodeIndex>& candidates) {
    std::vector<NodeScore> scores = score_candidates(graph, candidates);
    std::vector<double> btw = betweenness_centrality(graph);
    std::vector<std::string> ranked;
    ranked.reserve(candidates.size());
    for (NodeIndex i : candidates) ranked.push_back(graph.node(i).id);
    std::sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
        const double ba = btw[*graph.find(a)];
        const double bb = btw[*graph.find(b)];
        return ba != bb ? ba > bb : a < b;
    });
    return assemble("betweenness", request, std::move(ranked), std::move(scores));
}

Placement place_random(const NetworkGraph& graph, const PlacementRequest& request,
                       const std::vector<NodeIndex>& candidates) {
    std::vector<NodeScore> scores = score_candidates(graph, candidates);
    std::vector<std::string> ranked = ids_of(graph, candidates);
    // The client slot is fixed before drawing so the shuffle only
    // permutes service nodes.
    std::string client = request.client_id.empty() ? scores.back().id : request.client_id;
    std::erase(ranked, client);
    Rng rng(request.seed);
    for (size_t i = ranked.size(); i > 1; --i) {
        std::swap(ranked[i - 1], ranked[rng.uniform_int(i)]);
    }
    PlacementRequest fixed = request;
    fixed.client_id = client;
    return assemble("random", fixed, std::move(ranked), std::move(scores));
}

Placement make_placement(const NetworkGraph& graph, const std::string& strategy,
                         const PlacementRequest& request, std::vector<NodeIndex> candidates) {
    if (candidates.empty()) candidates = candidate_pool(graph);
    if (strategy == "basp") return place_basp(graph, request, candidates);
    if (strategy == "random") return place_random(graph, request, candidates);
    if (strategy == "betweenness") return place_betweenness(graph, request, candidates);
    throw ConfigError("placement: unknown strategy '" + strategy +
                      "' (expected basp, random, or betweenness)");
}

}  // namespace meshchain
