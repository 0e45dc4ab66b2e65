#include "meshchain/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "meshchain/errors.hpp"

namespace meshchain {

namespace {

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double to_double(const std::string& value, const std::string& ctx) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(ctx + ": bad number '" + value + "'");
    }
    return v;
}

uint64_t to_u64(const std::string& value, const std::string& ctx) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(ctx + ": bad non-negative integer '" + value + "'");
    }
    return v;
}

uint32_t to_u32(const std::string& value, const std::string& ctx) {
    const uint64_t v = to_u64(value, ctx);
    if (v > UINT32_MAX) throw ConfigError(ctx + ": value out of range '" + value + "'");
    return uint32_t(v);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Applies one key from the config file; returns false when the
// (section, key) pair is unknown.
bool apply_key(Scenario& s, SweepSpec* sweep, const std::string& section,
               const std::string& key, const std::string& value, const std::string& ctx) {
    if (section == "topology") {
        auto& t = s.topology;
        if (key == "file") t.file = value;
        else if (key == "n_nodes") t.params.n_nodes = to_u32(value, ctx);
        else if (key == "avg_degree") t.params.avg_degree = to_double(value, ctx);
        else if (key == "bandwidth_mean_bps") t.params.bandwidth.mean_bps = to_double(value, ctx);
        else if (key == "bandwidth_quantile_bps")
            t.params.bandwidth.quantile_bps = to_double(value, ctx);
        else if (key == "bandwidth_quantile_prob")
            t.params.bandwidth.quantile_prob = to_double(value, ctx);
        else if (key == "latency_kind") t.params.latency.kind = value;
        else if (key == "latency_min_s") t.params.latency.min_s = to_double(value, ctx);
        else if (key == "latency_max_s") t.params.latency.max_s = to_double(value, ctx);
        else if (key == "max_background_bps") t.params.max_background_bps = to_double(value, ctx);
        else if (key == "hosts") t.params.hosts = to_u32(value, ctx);
        else if (key == "topology_seed") t.params.seed = to_u64(value, ctx);
        else return false;
        return true;
    }
    if (section == "placement") {
        if (key == "strategy") s.strategy = value;
        else if (key == "n_endorsers") s.placement.n_endorsers = to_u32(value, ctx);
        else if (key == "n_committers") s.placement.n_committers = to_u32(value, ctx);
        else if (key == "client") s.placement.client_id = value;
        else if (key == "placement_seed") s.placement.seed = to_u64(value, ctx);
        else return false;
        return true;
    }
    if (section == "protocol") {
        if (key == "required_k") s.required_k = int(to_u32(value, ctx));
        else if (key == "block_size") s.orderer.block_size = to_u32(value, ctx);
        else if (key == "batch_timeout") s.orderer.batch_timeout = to_double(value, ctx);
        else if (key == "endorse_timeout") s.endorse_timeout = to_double(value, ctx);
        else return false;
        return true;
    }
    if (section == "workload") {
        auto& w = s.workload;
        if (key == "chaincode") w.chaincode = value;
        else if (key == "function") w.function = value;
        else if (key == "tx_count") w.tx_count = to_u32(value, ctx);
        else if (key == "mode") w.mode = value;
        else if (key == "start_time") w.start_time = to_double(value, ctx);
        else if (key == "participants") w.participants = value;
        else if (key == "period") w.period = value;
        else return false;
        return true;
    }
    if (section == "cpu") {
        if (key == "cost_endorse") s.cpu.cost_endorse = to_double(value, ctx);
        else if (key == "cost_validate_per_tx") s.cpu.cost_validate_per_tx = to_double(value, ctx);
        else if (key == "cost_order_per_tx") s.cpu.cost_order_per_tx = to_double(value, ctx);
        else if (key == "cost_client_per_response")
            s.cpu.cost_client_per_response = to_double(value, ctx);
        else return false;
        return true;
    }
    if (section == "sizes") {
        if (key == "proposal_bytes") s.sizes.proposal_bytes = to_u64(value, ctx);
        else if (key == "response_bytes") s.sizes.response_bytes = to_u64(value, ctx);
        else if (key == "submission_bytes") s.sizes.submission_bytes = to_u64(value, ctx);
        else if (key == "block_header_bytes") s.sizes.block_header_bytes = to_u64(value, ctx);
        else if (key == "block_per_tx_bytes") s.sizes.block_per_tx_bytes = to_u64(value, ctx);
        else if (key == "notification_bytes") s.sizes.notification_bytes = to_u64(value, ctx);
        else return false;
        return true;
    }
    if (section == "memory") {
        auto& m = s.memory;
        if (key == "base_client") m.base_client = to_double(value, ctx);
        else if (key == "base_endorser") m.base_endorser = to_double(value, ctx);
        else if (key == "base_committer") m.base_committer = to_double(value, ctx);
        else if (key == "base_orderer") m.base_orderer = to_double(value, ctx);
        else if (key == "per_item_client") m.per_item_client = to_double(value, ctx);
        else if (key == "per_item_endorser") m.per_item_endorser = to_double(value, ctx);
        else if (key == "per_item_committer") m.per_item_committer = to_double(value, ctx);
        else if (key == "per_item_orderer") m.per_item_orderer = to_double(value, ctx);
        else if (key == "cap") m.cap = to_double(value, ctx);
        else return false;
        return true;
    }
    if (section == "run") {
        if (key == "seed") s.seed = to_u64(value, ctx);
        else if (key == "horizon") s.horizon = to_double(value, ctx);
        else return false;
        return true;
    }
    if (section == "sweep") {
        if (!sweep) throw ConfigError(ctx + ": [sweep] section not allowed in a scenario file");
        if (key == "axis") sweep->axis = value;
        else if (key == "values") sweep->values = split_list(value);
        else if (key == "seeds") sweep->seeds = to_u32(value, ctx);
        else return false;
        return true;
    }
    throw ConfigError(ctx + ": unknown section [" + section + "]");
}

void parse_config(const std::string& text, const std::string& origin, Scenario& scenario,
                  SweepSpec* sweep) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string ctx = origin + " line " + std::to_string(line_no);
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(ctx + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(ctx + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(ctx + ": key before any [section]");
        if (!apply_key(scenario, sweep, section, key, value, ctx)) {
            throw ConfigError(ctx + ": unknown key '" + key + "' in [" + section + "]");
        }
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void serialize_scenario_body(std::ostream& out, const Scenario& s) {
    out << "[topology]\n";
    out << "file = " << s.topology.file << "\n";
    const auto& p = s.topology.params;
    out << "n_nodes = " << p.n_nodes << "\n";
    out << "avg_degree = " << fmt_double(p.avg_degree) << "\n";
    out << "bandwidth_mean_bps = " << fmt_double(p.bandwidth.mean_bps) << "\n";
    out << "bandwidth_quantile_bps = " << fmt_double(p.bandwidth.quantile_bps) << "\n";
    out << "bandwidth_quantile_prob = " << fmt_double(p.bandwidth.quantile_prob) << "\n";
    out << "latency_kind = " << p.latency.kind << "\n";
    out << "latency_min_s = " << fmt_double(p.latency.min_s) << "\n";
    out << "latency_max_s = " << fmt_double(p.latency.max_s) << "\n";
    out << "max_background_bps = " << fmt_double(p.max_background_bps) << "\n";
    out << "hosts = " << p.hosts << "\n";
    out << "topology_seed = " << p.seed << "\n";
    out << "\n[placement]\n";
    out << "strategy = " << s.strategy << "\n";
    out << "n_endorsers = " << s.placement.n_endorsers << "\n";
    out << "n_committers = " << s.placement.n_committers << "\n";
    out << "client = " << s.placement.client_id << "\n";
    out << "placement_seed = " << s.placement.seed << "\n";
    out << "\n[protocol]\n";
    out << "required_k = " << s.required_k << "\n";
    out << "block_size = " << s.orderer.block_size << "\n";
    out << "batch_timeout = " << fmt_double(s.orderer.batch_timeout) << "\n";
    out << "endorse_timeout = " << fmt_double(s.endorse_timeout) << "\n";
    out << "\n[workload]\n";
    out << "chaincode = " << s.workload.chaincode << "\n";
    out << "function = " << s.workload.function << "\n";
    out << "tx_count = " << s.workload.tx_count << "\n";
    out << "mode = " << s.workload.mode << "\n";
    out << "start_time = " << fmt_double(s.workload.start_time) << "\n";
    out << "participants = " << s.workload.participants << "\n";
    out << "period = " << s.workload.period << "\n";
    out << "\n[cpu]\n";
    out << "cost_endorse = " << fmt_double(s.cpu.cost_endorse) << "\n";
    out << "cost_validate_per_tx = " << fmt_double(s.cpu.cost_validate_per_tx) << "\n";
    out << "cost_order_per_tx = " << fmt_double(s.cpu.cost_order_per_tx) << "\n";
    out << "cost_client_per_response = " << fmt_double(s.cpu.cost_client_per_response) << "\n";
    out << "\n[sizes]\n";
    out << "proposal_bytes = " << s.sizes.proposal_bytes << "\n";
    out << "response_bytes = " << s.sizes.response_bytes << "\n";
    out << "submission_bytes = " << s.sizes.submission_bytes << "\n";
    out << "block_header_bytes = " << s.sizes.block_header_bytes << "\n";
    out << "block_per_tx_bytes = " << s.sizes.block_per_tx_bytes << "\n";
    out << "notification_bytes = " << s.sizes.notification_bytes << "\n";
    out << "\n[memory]\n";
    out << "base_client = " << fmt_double(s.memory.base_client) << "\n";
    out << "base_endorser = " << fmt_double(s.memory.base_endorser) << "\n";
    out << "base_committer = " << fmt_double(s.memory.base_committer) << "\n";
    out << "base_orderer = " << fmt_double(s.memory.base_orderer) << "\n";
    out << "per_item_client = " << fmt_double(s.memory.per_item_client) << "\n";
    out << "per_item_endorser = " << fmt_double(s.memory.per_item_endorser) << "\n";
    out << "per_item_committer = " << fmt_double(s.memory.per_item_committer) << "\n";
    out << "per_item_orderer = " << fmt_double(s.memory.per_item_orderer) << "\n";
    out << "cap = " << fmt_double(s.memory.cap) << "\n";
    out << "\n[run]\n";
    out << "seed = " << s.seed << "\n";
    out << "horizon = " << fmt_double(s.horizon) << "\n";
}

}  // namespace

void Scenario::validate() const {
    std::vector<std::string> problems;
    const auto bad = [&](const std::string& msg) { problems.push_back(msg); };

    if (topology.file.empty()) {
        const auto& p = topology.params;
        if (p.n_nodes < 2) bad("topology.n_nodes must be >= 2");
        if (p.avg_degree < 2.0) bad("topology.avg_degree must be >= 2");
        if (p.bandwidth.mean_bps <= 0) bad("topology.bandwidth_mean_bps must be > 0");
        if (p.bandwidth.quantile_bps <= 0) bad("topology.bandwidth_quantile_bps must be > 0");
        if (p.bandwidth.quantile_prob <= 0 || p.bandwidth.quantile_prob >= 1) {
            bad("topology.bandwidth_quantile_prob must be in (0,1)");
        }
        if (p.latency.kind != "uniform" && p.latency.kind != "bandwidth-scaled") {
            bad("topology.latency_kind must be uniform or bandwidth-scaled");
        }
        if (p.latency.min_s < 0 || p.latency.max_s < p.latency.min_s) {
            bad("topology latency bounds need 0 <= min <= max");
        }
        if (p.max_background_bps < 0) bad("topology.max_background_bps must be >= 0");
    }
    if (strategy != "basp" && strategy != "random" && strategy != "betweenness") {
        bad("placement.strategy must be basp, random, or betweenness");
    }
    if (placement.n_endorsers < 1) bad("placement.n_endorsers must be >= 1");
    if (required_k < 1) bad("protocol.required_k must be >= 1");
    if (required_k > int(placement.n_endorsers)) {
        bad("protocol.required_k must be <= placement.n_endorsers");
    }
    if (orderer.block_size < 1) bad("protocol.block_size must be >= 1");
    if (orderer.batch_timeout <= 0) bad("protocol.batch_timeout must be > 0");
    if (endorse_timeout <= 0) bad("protocol.endorse_timeout must be > 0");
    if (workload.chaincode.empty()) bad("workload.chaincode must be set");
    if (workload.function != "record" && workload.function != "query_balance") {
        bad("workload.function must be record or query_balance");
    }
    if (workload.mode != "serial" && workload.mode != "parallel") {
        bad("workload.mode must be serial or parallel");
    }
    if (workload.participants != "per-tx" && workload.participants != "shared") {
        bad("workload.participants must be per-tx or shared");
    }
    if (workload.start_time < 0) bad("workload.start_time must be >= 0");
    if (workload.period.empty() || workload.period.find('/') != std::string::npos) {
        bad("workload.period must be non-empty without '/'");
    }
    if (cpu.cost_endorse < 0 || cpu.cost_validate_per_tx < 0 || cpu.cost_order_per_tx < 0 ||
        cpu.cost_client_per_response < 0) {
        bad("cpu costs must be >= 0");
    }
    if (sizes.proposal_bytes == 0 || sizes.response_bytes == 0 || sizes.submission_bytes == 0 ||
        sizes.block_per_tx_bytes == 0 || sizes.notification_bytes == 0) {
        bad("message sizes must be > 0");
    }
    if (memory.cap <= 0 || memory.cap > 1) bad("memory.cap must be in (0,1]");
    if (horizon < 0) bad("run.horizon must be >= 0");

    if (!problems.empty()) {
        std::string joined = "invalid scenario: ";
        for (size_t i = 0; i < problems.size(); ++i) {
            if (i) joined += "; ";
            joined += problems[i];
        }
        throw ConfigError(joined);
    }
}

void SweepSpec::validate() const {
    base.validate();
    std::vector<std::string> problems;
    if (axis != "block_size" && axis != "n_endorsers" && axis != "placement") {
        problems.push_back("sweep.axis must be block_size, n_endorsers, or placement");
    }
    if (values.empty()) problems.push_back("sweep.values must be non-empty");
    if (seeds < 1) problems.push_back("sweep.seeds must be >= 1");
    if (problems.empty()) {
        for (const auto& v : values) {
            try {
                apply_axis(base, axis, v).validate();
            } catch (const ConfigError& e) {
                problems.push_back("sweep value '" + v + "': " + e.what());
            }
        }
    }
    if (!problems.empty()) {
        std::string joined = "invalid sweep: ";
        for (size_t i = 0; i < problems.size(); ++i) {
            if (i) joined += "; ";
            joined += problems[i];
        }
        throw ConfigError(joined);
    }
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    Scenario s;
    parse_config(text, origin, s, nullptr);
    return s;
}

Scenario load_scenario(const std::string& path) {
    return parse_scenario(read_file(path), path);
}

std::string serialize_scenario(const Scenario& scenario) {
    std::ostringstream out;
    serialize_scenario_body(out, scenario);
    return out.str();
}

SweepSpec parse_sweep(const std::string& text, const std::string& origin) {
    SweepSpec sweep;
    parse_config(text, origin, sweep.base, &sweep);
    return sweep;
}

SweepSpec load_sweep(const std::string& path) { return parse_sweep(read_file(path), path); }

std::string serialize_sweep(const SweepSpec& sweep) {
    std::ostringstream out;
    serialize_scenario_body(out, sweep.base);
    out << "\n[sweep]\n";
    out << "axis = " << sweep.axis << "\n";
    out << "values = ";
    for (size_t i = 0; i < sweep.values.size(); ++i) {
        if (i) out << ",";
        out << sweep.values[i];
    }
    out << "\n";
    out << "seeds = " << sweep.seeds << "\n";
    return out.str();
}

Scenario apply_axis(const Scenario& base, const std::string& axis, const std::string& value) {
    Scenario s = base;
    const std::string ctx = "sweep axis " + axis;
    if (axis == "block_size") {
        s.orderer.block_size = to_u32(value, ctx);
    } else if (axis == "n_endorsers") {
        s.placement.n_endorsers = to_u32(value, ctx);
    } else if (axis == "placement") {
        s.strategy = value;
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    return s;
}

}  // namespace meshchain
