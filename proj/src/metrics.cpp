#include "meshchain/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "meshchain/errors.hpp"

namespace meshchain {

double MemoryModel::fraction(const std::string& role, uint32_t queue_depth) const {
    double base = base_client;
    double per_item = per_item_client;
    if (role == "endorser") {
        base = base_endorser;
        per_item = per_item_endorser;
    } else if (role == "committer") {
        base = base_committer;
        per_item = per_item_committer;
    } else if (role == "orderer") {
        base = base_orderer;
        per_item = per_item_orderer;
    }
    return std::min(cap, base + per_item * double(queue_depth));
}

std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

namespace {

std::string opt_seconds(const std::optional<double>& v) {
    return v ? format_seconds(*v) : std::string();
}

}  // namespace

Summary summarize(const RunMetrics& metrics) {
    Summary s;
    s.proposed = metrics.tx_records.size();
    s.blocks_cut = metrics.blocks_cut;

    std::vector<double> latencies;
    std::optional<double> first_proposed;
    std::optional<double> last_committed;
    for (const auto& r : metrics.tx_records) {
        if (r.outcome == kOutcomeValid) {
            s.committed_valid += 1;
        } else if (r.outcome == kOutcomeInvalid) {
            s.committed_invalid += 1;
        } else if (r.outcome == kOutcomeRejected) {
            s.rejected += 1;
        }
        if (!r.t_committed) continue;
        latencies.push_back(*r.t_committed - r.t_proposed);
        if (!first_proposed || r.t_proposed < *first_proposed) first_proposed = r.t_proposed;
        if (!last_committed || *r.t_committed > *last_committed) last_committed = *r.t_committed;
    }
    if (!latencies.empty()) {
        s.ttc = *last_committed - *first_proposed;
        std::sort(latencies.begin(), latencies.end());
        double sum = 0.0;
        for (double v : latencies) sum += v;
        s.mean_latency = sum / double(latencies.size());
        const size_t n = latencies.size();
        s.median_latency = n % 2 == 1 ? latencies[n / 2]
                                      : (latencies[n / 2 - 1] + latencies[n / 2]) / 2.0;
        const size_t rank = size_t(std::ceil(0.95 * double(n)));
        s.p95_latency = latencies[std::max<size_t>(rank, 1) - 1];
    }
    for (const auto& u : metrics.usage) {
        double peak = 0.0;
        for (double f : u.busy_fraction) peak = std::max(peak, f);
        auto [it, inserted] = s.peak_cpu.emplace(u.role, peak);
        if (!inserted) it->second = std::max(it->second, peak);
    }
    return s;
}

double compare(const Summary& a, const Summary& b) {
    if (!a.mean_latency || !b.mean_latency) {
        throw SimError("compare: both summaries need committed transactions");
    }
    if (*a.mean_latency == 0) throw SimError("compare: zero baseline latency");
    return (*a.mean_latency - *b.mean_latency) / *a.mean_latency;
}

void write_tx_records_csv(std::ostream& out, const std::vector<TxRecord>& records) {
    out << "tx_id,t_proposed,t_endorsed,t_submitted,t_committed,t_notified,outcome\n";
    for (const auto& r : records) {
        out << r.tx_id << ',' << format_seconds(r.t_proposed) << ',' << opt_seconds(r.t_endorsed)
            << ',' << opt_seconds(r.t_submitted) << ',' << opt_seconds(r.t_committed) << ','
            << opt_seconds(r.t_notified) << ',' << r.outcome << '\n';
    }
}

void write_utilization_csv(std::ostream& out, const std::vector<NodeUsage>& usage) {
    out << "node,role,window_start,busy_fraction\n";
    for (const auto& u : usage) {
        for (size_t w = 0; w < u.busy_fraction.size(); ++w) {
            out << u.node << ',' << u.role << ',' << format_seconds(double(w)) << ','
                << format_seconds(u.busy_fraction[w]) << '\n';
        }
    }
}

void write_memory_csv(std::ostream& out, const std::vector<NodeUsage>& usage) {
    out << "node,role,window_start,mem_fraction\n";
    for (const auto& u : usage) {
        for (size_t w = 0; w < u.mem_fraction.size(); ++w) {
            out << u.node << ',' << u.role << ',' << format_seconds(double(w)) << ','
                << format_seconds(u.mem_fraction[w]) << '\n';
        }
    }
}

namespace {

void summary_rows(const Summary& s,
                  std::vector<std::pair<std::string, std::string>>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_seconds(*v) : "n/a"; };
    rows.emplace_back("proposed", std::to_string(s.proposed));
    rows.emplace_back("committed_valid", std::to_string(s.committed_valid));
    rows.emplace_back("committed_invalid", std::to_string(s.committed_invalid));
    rows.emplace_back("rejected", std::to_string(s.rejected));
    rows.emplace_back("blocks_cut", std::to_string(s.blocks_cut));
    rows.emplace_back("ttc_s", opt(s.ttc));
    rows.emplace_back("mean_latency_s", opt(s.mean_latency));
    rows.emplace_back("median_latency_s", opt(s.median_latency));
    rows.emplace_back("p95_latency_s", opt(s.p95_latency));
    for (const auto& [role, peak] : s.peak_cpu) {
        rows.emplace_back("peak_cpu_" + role, format_seconds(peak));
    }
}

}  // namespace

void write_summary_csv(std::ostream& out, const Summary& summary) {
    std::vector<std::pair<std::string, std::string>> rows;
    summary_rows(summary, rows);
    out << "metric,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

std::string format_summary_table(const Summary& summary) {
    std::vector<std::pair<std::string, std::string>> rows;
    summary_rows(summary, rows);
    size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    std::ostringstream out;
    for (const auto& [k, v] : rows) {
        out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
    }
    return out.str();
}

}  // namespace meshchain
