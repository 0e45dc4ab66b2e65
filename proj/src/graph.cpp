#include "meshchain/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "meshchain/errors.hpp"

namespace meshchain {

NetworkGraph::NetworkGraph(std::vector<MeshNode> nodes, std::vector<MeshLink> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    if (nodes_.empty()) throw ConfigError("graph: no nodes");

    std::vector<NodeIndex> order(nodes_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](NodeIndex a, NodeIndex b) { return nodes_[a].id < nodes_[b].id; });
    std::vector<NodeIndex> position(nodes_.size());
    std::vector<MeshNode> sorted;
    sorted.reserve(nodes_.size());
    for (size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = NodeIndex(i);
        sorted.push_back(std::move(nodes_[order[i]]));
    }
    nodes_ = std::move(sorted);
    for (size_t i = 1; i < nodes_.size(); ++i) {
        if (nodes_[i].id == nodes_[i - 1].id) {
            throw ConfigError("graph: duplicate node id " + nodes_[i].id);
        }
    }

    for (auto& link : links_) {
        if (link.a >= nodes_.size() || link.b >= nodes_.size()) {
            throw ConfigError("graph: link endpoint out of range");
        }
        link.a = position[link.a];
        link.b = position[link.b];
        if (link.a == link.b) {
            throw ConfigError("graph: self-loop at " + nodes_[link.a].id);
        }
        if (link.a > link.b) std::swap(link.a, link.b);
        if (link.latency_s < 0) throw ConfigError("graph: negative latency");
        if (link.background_bps < 0) throw ConfigError("graph: negative background traffic");
        if (link.capacity_bps <= link.background_bps) {
            throw ConfigError("graph: link " + nodes_[link.a].id + "-" + nodes_[link.b].id +
                              " capacity must exceed background traffic");
        }
    }
    std::sort(links_.begin(), links_.end(), [&](const MeshLink& x, const MeshLink& y) {
        return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });

    adjacency_.assign(nodes_.size(), {});
    for (size_t i = 0; i < links_.size(); ++i) {
        const MeshLink& link = links_[i];
        auto [it, inserted] = link_index_.emplace(std::pair(link.a, link.b), i);
        if (!inserted) {
            throw ConfigError("graph: duplicate link " + nodes_[link.a].id + "-" +
                              nodes_[link.b].id);
        }
        adjacency_[link.a].push_back(link.b);
        adjacency_[link.b].push_back(link.a);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::optional<NodeIndex> NetworkGraph::find(const std::string& id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const MeshNode& n, const std::string& v) { return n.id < v; });
    if (it == nodes_.end() || it->id != id) return std::nullopt;
    return NodeIndex(it - nodes_.begin());
}

NodeIndex NetworkGraph::require(const std::string& id) const {
    auto idx = find(id);
    if (!idx) throw ConfigError("graph: unknown node " + id);
    return *idx;
}

const MeshLink& NetworkGraph::link_between(NodeIndex a, NodeIndex b) const {
    if (a > b) std::swap(a, b);
    auto it = link_index_.find(std::pair(a, b));
    if (it == link_index_.end()) {
        throw SimError("graph: no link " + nodes_[a].id + "-" + nodes_[b].id);
    }
    return links_[it->second];
}

std::vector<NodeIndex> NetworkGraph::host_nodes() const {
    std::vector<NodeIndex> hosts;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].host) hosts.push_back(NodeIndex(i));
    }
    return hosts;
}

bool NetworkGraph::connected() const {
    std::vector<char> seen(nodes_.size(), 0);
    std::deque<NodeIndex> frontier{0};
    seen[0] = 1;
    size_t reached = 1;
    while (!frontier.empty()) {
        NodeIndex v = frontier.front();
        frontier.pop_front();
        for (NodeIndex w : adjacency_[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                frontier.push_back(w);
            }
        }
    }
    return reached == nodes_.size();
}

bool NetworkGraph::operator==(const NetworkGraph& other) const {
    if (nodes_.size() != other.nodes_.size() || links_.size() != other.links_.size()) return false;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id != other.nodes_[i].id || nodes_[i].host != other.nodes_[i].host) {
            return false;
        }
    }
    for (size_t i = 0; i < links_.size(); ++i) {
        const MeshLink& x = links_[i];
        const MeshLink& y = other.links_[i];
        if (x.a != y.a || x.b != y.b || x.capacity_bps != y.capacity_bps ||
            x.latency_s != y.latency_s || x.background_bps != y.background_bps) {
            return false;
        }
    }
    return true;
}

std::vector<NodeIndex> route(const NetworkGraph& graph, NodeIndex src, NodeIndex dst) {
    if (src == dst) return {};
    const size_t n = graph.node_count();
    std::vector<uint32_t> dist(n, UINT32_MAX);
    std::deque<NodeIndex> frontier{dst};
    dist[dst] = 0;
    while (!frontier.empty()) {
        NodeIndex v = frontier.front();
        frontier.pop_front();
        for (NodeIndex w : graph.neighbors(v)) {
            if (dist[w] == UINT32_MAX) {
                dist[w] = dist[v] + 1;
                frontier.push_back(w);
            }
        }
    }
    if (dist[src] == UINT32_MAX) {
        throw SimError("route: " + graph.node(dst).id + " unreachable from " +
                       graph.node(src).id);
    }
    // Walk toward dst, always taking the smallest-id neighbor that stays
    // on a shortest path; neighbors ascend by id, so the first hit wins.
    std::vector<NodeIndex> path{src};
    NodeIndex at = src;
    while (at != dst) {
        for (NodeIndex w : graph.neighbors(at)) {
            if (dist[w] + 1 == dist[at]) {
                path.push_back(w);
                at = w;
                break;
            }
        }
    }
    return path;
}

double transfer_time(const NetworkGraph& graph, const std::vector<NodeIndex>& path,
                     uint64_t size_bytes) {
    if (path.size() < 2) return 0.0;
    double latency = 0.0;
    double bottleneck_bps = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const MeshLink& link = graph.link_between(path[i], path[i + 1]);
        latency += link.latency_s;
        bottleneck_bps = std::min(bottleneck_bps, link.effective_bps());
    }
    return latency + double(size_bytes) * 8.0 / bottleneck_bps;
}

std::vector<double> degree_centrality(const NetworkGraph& graph) {
    const size_t n = graph.node_count();
    if (n < 2) throw ConfigError("degree_centrality: need at least 2 nodes");
    std::vector<double> scores(n);
    for (size_t i = 0; i < n; ++i) {
        scores[i] = double(graph.degree(NodeIndex(i))) / double(n - 1);
    }
    return scores;
}

std::vector<double> betweenness_centrality(const NetworkGraph& graph) {
    // Brandes' accumulation over BFS shortest paths; the ordered-pair sum
    // is halved to count unordered pairs.
    const size_t n = graph.node_count();
    std::vector<double> centrality(n, 0.0);
    std::vector<uint64_t> sigma(n);
    std::vector<int64_t> dist(n);
    std::vector<double> delta(n);
    std::vector<std::vector<NodeIndex>> preds(n);
    std::vector<NodeIndex> order;
    order.reserve(n);

    for (NodeIndex s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0);
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order.clear();

        sigma[s] = 1;
        dist[s] = 0;
        std::deque<NodeIndex> frontier{s};
        while (!frontier.empty()) {
            NodeIndex v = frontier.front();
            frontier.pop_front();
            order.push_back(v);
            for (NodeIndex w : graph.neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    frontier.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            NodeIndex w = *it;
            for (NodeIndex v : preds[w]) {
                delta[v] += double(sigma[v]) / double(sigma[w]) * (1.0 + delta[w]);
            }
            if (w != s) centrality[w] += delta[w];
        }
    }
    for (double& c : centrality) c /= 2.0;
    return centrality;
}

CentralityScores centrality_scores(const NetworkGraph& graph) {
    return {degree_centrality(graph), betweenness_centrality(graph)};
}

double BandwidthModel::sigma() const {
    const double z = inverse_normal_cdf(quantile_prob);
    const double disc = z * z - 2.0 * std::log(quantile_bps / mean_bps);
    if (disc < 0) throw ConfigError("bandwidth model: mean/quantile constraints infeasible");
    const double root = z + std::sqrt(disc);
    if (root <= 0) throw ConfigError("bandwidth model: no positive sigma solution");
    return root;
}

double BandwidthModel::mu() const {
    return std::log(quantile_bps) - inverse_normal_cdf(quantile_prob) * sigma();
}

double BandwidthModel::sample(Rng& rng) const {
    return rng.lognormal(mu(), sigma());
}

namespace {

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string node_label(uint32_t index, uint32_t n_nodes) {
    int width = 1;
    for (uint32_t v = n_nodes - 1; v >= 10; v /= 10) ++width;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%0*u", std::min(width, 10), index);
    return buf;
}

double node_effective_bandwidth(const std::vector<MeshLink>& links, NodeIndex node) {
    double total = 0.0;
    for (const auto& link : links) {
        if (link.a == node || link.b == node) total += link.effective_bps();
    }
    return total;
}

// Host spread: cycle over rankings (bandwidth, degree, betweenness,
// weakest combined) so the selected set covers well-connected nodes,
// bridges, and poorly connected ones alike.
void mark_hosts_spread(std::vector<MeshNode>& nodes, const NetworkGraph& graph,
                       uint32_t want) {
    const size_t n = nodes.size();
    std::vector<double> bw(n);
    for (size_t i = 0; i < n; ++i) {
        bw[i] = node_effective_bandwidth(graph.links(), NodeIndex(i));
    }
    std::vector<double> deg = degree_centrality(graph);
    std::vector<double> btw = betweenness_centrality(graph);

    auto ranked = [&](auto better) {
        std::vector<NodeIndex> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), better);
        return idx;
    };
    const double bw_max = *std::max_element(bw.begin(), bw.end());
    std::vector<double> combined(n);
    for (size_t i = 0; i < n; ++i) combined[i] = bw[i] / bw_max + deg[i];

    std::vector<std::vector<NodeIndex>> lists;
    lists.push_back(ranked([&](NodeIndex a, NodeIndex b) {
        return bw[a] != bw[b] ? bw[a] > bw[b] : a < b;
    }));
    lists.push_back(ranked([&](NodeIndex a, NodeIndex b) {
        return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
    }));
    lists.push_back(ranked([&](NodeIndex a, NodeIndex b) {
        return btw[a] != btw[b] ? btw[a] > btw[b] : a < b;
    }));
    lists.push_back(ranked([&](NodeIndex a, NodeIndex b) {
        return combined[a] != combined[b] ? combined[a] < combined[b] : a < b;
    }));

    std::vector<char> chosen(n, 0);
    uint32_t count = 0;
    std::vector<size_t> cursor(lists.size(), 0);
    for (size_t turn = 0; count < want && count < n; turn = (turn + 1) % lists.size()) {
        auto& list = lists[turn];
        auto& pos = cursor[turn];
        while (pos < list.size() && chosen[list[pos]]) ++pos;
        if (pos == list.size()) continue;
        chosen[list[pos]] = 1;
        ++count;
    }
    for (size_t i = 0; i < n; ++i) nodes[i].host = chosen[i] != 0;
}

}  // namespace

NetworkGraph generate_topology(const TopologyParams& params) {
    if (params.n_nodes < 2) throw ConfigError("generate_topology: need at least 2 nodes");
    if (params.avg_degree < 2.0) throw ConfigError("generate_topology: avg_degree must be >= 2");

    Rng master(params.seed);
    Rng point_rng = master.split("points");
    Rng bw_rng = master.split("bandwidth");
    Rng lat_rng = master.split("latency");
    Rng bg_rng = master.split("background");

    const uint32_t n = params.n_nodes;
    const size_t pair_count = size_t(n) * (n - 1) / 2;
    size_t target_edges = size_t(std::llround(double(n) * params.avg_degree / 2.0));
    target_edges = std::clamp(target_edges, size_t(1), pair_count);

    constexpr int kMaxAttempts = 200;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<std::pair<double, double>> pts(n);
        for (auto& p : pts) {
            p.first = point_rng.uniform();
            p.second = point_rng.uniform();
        }
        std::vector<std::tuple<double, uint32_t, uint32_t>> dists;
        dists.reserve(pair_count);
        for (uint32_t i = 0; i < n; ++i) {
            for (uint32_t j = i + 1; j < n; ++j) {
                const double dx = pts[i].first - pts[j].first;
                const double dy = pts[i].second - pts[j].second;
                dists.emplace_back(dx * dx + dy * dy, i, j);
            }
        }
        std::nth_element(dists.begin(), dists.begin() + (target_edges - 1), dists.end());
        const double radius_sq = std::get<0>(dists[target_edges - 1]);

        std::vector<MeshNode> nodes;
        nodes.reserve(n);
        for (uint32_t i = 0; i < n; ++i) nodes.push_back({node_label(i, n), false});

        std::vector<MeshLink> links;
        std::vector<std::pair<uint32_t, uint32_t>> pairs;
        for (const auto& [d, i, j] : dists) {
            if (d <= radius_sq) pairs.emplace_back(i, j);
        }
        std::sort(pairs.begin(), pairs.end());

        std::vector<double> capacities(pairs.size());
        for (auto& c : capacities) c = std::max(1.0, std::round(params.bandwidth.sample(bw_rng)));

        // Latency ranks follow capacity: slowest links are the most
        // congested and carry the longest per-hop delay.
        std::vector<size_t> cap_order(pairs.size());
        std::iota(cap_order.begin(), cap_order.end(), 0);
        std::sort(cap_order.begin(), cap_order.end(), [&](size_t x, size_t y) {
            return capacities[x] != capacities[y] ? capacities[x] < capacities[y] : x < y;
        });
        std::vector<double> latencies(pairs.size());
        for (size_t rank = 0; rank < cap_order.size(); ++rank) {
            double value;
            if (params.latency.kind == "bandwidth-scaled") {
                const double frac =
                    pairs.size() == 1 ? 1.0 : double(rank) / double(pairs.size() - 1);
                value = params.latency.max_s - (params.latency.max_s - params.latency.min_s) * frac;
            } else {
                value = lat_rng.uniform(params.latency.min_s, params.latency.max_s);
            }
            latencies[cap_order[rank]] = round_to(value, 1e-4);
        }

        for (size_t k = 0; k < pairs.size(); ++k) {
            const double skew = bg_rng.uniform();
            const double background =
                std::min(std::round(params.max_background_bps * skew * skew * skew),
                         std::floor(0.9 * capacities[k]));
            links.push_back({pairs[k].first, pairs[k].second, capacities[k], latencies[k],
                             background});
        }

        NetworkGraph graph(std::move(nodes), std::move(links));
        if (!graph.connected()) continue;

        if (params.hosts > 0) {
            std::vector<MeshNode> marked = graph.nodes();
            mark_hosts_spread(marked, graph, params.hosts);
            return NetworkGraph(std::move(marked),
                                std::vector<MeshLink>(graph.links()));
        }
        return graph;
    }
    throw ConfigError("generate_topology: no connected sample after bounded retries");
}

namespace {

std::string format_double(double v) {
    if (v >= 0 && v == std::floor(v) && v < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(const std::string& token, int line_no, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ConfigError("topology line " + std::to_string(line_no) + ": bad " + what + " '" +
                          token + "'");
    }
    return v;
}

}  // namespace

NetworkGraph parse_topology(const std::string& text, const std::string& origin) {
    std::vector<MeshNode> nodes;
    std::map<std::string, uint32_t> index;
    std::vector<MeshLink> links;
    std::set<std::pair<uint32_t, uint32_t>> seen_links;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::vector<std::string> fields;
        for (std::string t; tokens >> t;) fields.push_back(t);
        if (fields.empty()) continue;

        if (fields[0] == "node") {
            if (fields.size() < 2 || fields.size() > 3 ||
                (fields.size() == 3 && fields[2] != "host")) {
                throw ConfigError("topology line " + std::to_string(line_no) +
                                  ": expected 'node <id> [host]'");
            }
            if (index.count(fields[1])) {
                throw ConfigError("topology line " + std::to_string(line_no) +
                                  ": duplicate node " + fields[1]);
            }
            index[fields[1]] = uint32_t(nodes.size());
            nodes.push_back({fields[1], fields.size() == 3});
        } else if (fields[0] == "link") {
            if (fields.size() != 6) {
                throw ConfigError(
                    "topology line " + std::to_string(line_no) +
                    ": expected 'link <a> <b> <capacity_bps> <latency_s> <background_bps>'");
            }
            auto a = index.find(fields[1]);
            auto b = index.find(fields[2]);
            if (a == index.end() || b == index.end()) {
                throw ConfigError("topology line " + std::to_string(line_no) +
                                  ": link references unknown node");
            }
            if (a->second == b->second) {
                throw ConfigError("topology line " + std::to_string(line_no) + ": self-loop on " +
                                  fields[1]);
            }
            const auto pair = std::minmax(a->second, b->second);
            if (!seen_links.insert(pair).second) {
                throw ConfigError("topology line " + std::to_string(line_no) +
                                  ": duplicate link " + fields[1] + " " + fields[2]);
            }
            links.push_back({a->second, b->second, parse_double(fields[3], line_no, "capacity"),
                             parse_double(fields[4], line_no, "latency"),
                             parse_double(fields[5], line_no, "background")});
        } else {
            throw ConfigError("topology line " + std::to_string(line_no) + ": unknown directive '" +
                              fields[0] + "'");
        }
    }
    if (nodes.empty()) throw ConfigError(origin + ": no nodes defined");

    NetworkGraph graph(std::move(nodes), std::move(links));
    if (graph.node_count() > 1 && !graph.connected()) {
        throw ConfigError(origin + ": graph is not connected");
    }
    return graph;
}

NetworkGraph load_topology(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open topology file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_topology(buf.str(), path);
}

std::string serialize_topology(const NetworkGraph& graph) {
    std::ostringstream out;
    for (const auto& node : graph.nodes()) {
        out << "node " << node.id;
        if (node.host) out << " host";
        out << "\n";
    }
    for (const auto& link : graph.links()) {
        out << "link " << graph.node(link.a).id << " " << graph.node(link.b).id << " "
            << format_double(link.capacity_bps) << " " << format_double(link.latency_s) << " "
            << format_double(link.background_bps) << "\n";
    }
    return out.str();
}

void save_topology(const NetworkGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write topology file " + path);
    out << serialize_topology(graph);
}

}  // namespace meshchain
