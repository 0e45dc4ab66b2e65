#include "meshchain/compensation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "meshchain/errors.hpp"

namespace meshchain {

namespace {

std::string arg_str(const Bytes& b) { return std::string(b.begin(), b.end()); }

bool parse_u64(const std::string& s, uint64_t& out) {
    if (s.empty() || s.size() > 19) return false;
    uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + uint64_t(c - '0');
    }
    out = v;
    return true;
}

bool valid_id(const std::string& s) {
    return !s.empty() && s.find('/') == std::string::npos;
}

std::string seq_key(const std::string& period, const std::string& participant) {
    return "seq/" + period + "/" + participant;
}

std::string rec_key(const std::string& period, const std::string& participant, uint64_t seq) {
    return "rec/" + period + "/" + participant + "/" + std::to_string(seq);
}

uint64_t read_seq(const WorldState& state, const std::string& key) {
    const Bytes* value = state.value_of(key);
    if (!value) return 0;
    ByteReader r(*value);
    return r.u64();
}

Bytes encode_seq(uint64_t seq) {
    ByteWriter w;
    w.u64(seq);
    return w.take();
}

SimulationResult do_record(const WorldState& state, const TxProposal& proposal) {
    if (proposal.args.size() != 5) {
        return SimulationResult::failure("record: expected 5 args");
    }
    const std::string participant = arg_str(proposal.args[0]);
    const std::string kind_str = arg_str(proposal.args[1]);
    const std::string quantity_str = arg_str(proposal.args[2]);
    const std::string value_str = arg_str(proposal.args[3]);
    const std::string period = arg_str(proposal.args[4]);

    if (!valid_id(participant) || !valid_id(period)) {
        return SimulationResult::failure("record: bad participant or period id");
    }
    RecordKind kind;
    if (kind_str == "contribution") {
        kind = RecordKind::Contribution;
    } else if (kind_str == "consumption") {
        kind = RecordKind::Consumption;
    } else {
        return SimulationResult::failure("record: unknown kind " + kind_str);
    }
    uint64_t quantity = 0;
    if (!parse_u64(quantity_str, quantity)) {
        return SimulationResult::failure("record: quantity must be a non-negative integer");
    }
    uint64_t unit_value = 0;
    if (!parse_u64(value_str, unit_value) || unit_value > uint64_t(INT64_MAX)) {
        return SimulationResult::failure("record: unit_value must be a non-negative integer");
    }

    ResourceRecord record{participant, kind, quantity, Micro(unit_value), period};
    const std::string skey = seq_key(period, participant);
    const uint64_t seq = read_seq(state, skey);

    ReadWriteSet rw;
    rw.reads.emplace_back(skey, state.version_of(skey));
    rw.writes.emplace_back(rec_key(period, participant, seq), record.encode());
    rw.writes.emplace_back(skey, encode_seq(seq + 1));
    return SimulationResult::success(std::move(rw));
}

SimulationResult do_query_balance(const WorldState& state, const TxProposal& proposal) {
    if (proposal.args.size() != 2) {
        return SimulationResult::failure("query_balance: expected 2 args");
    }
    const std::string participant = arg_str(proposal.args[0]);
    const std::string period = arg_str(proposal.args[1]);
    if (!valid_id(participant) || !valid_id(period)) {
        return SimulationResult::failure("query_balance: bad participant or period id");
    }
    const std::string skey = seq_key(period, participant);
    const uint64_t seq = read_seq(state, skey);

    ReadWriteSet rw;
    rw.reads.emplace_back(skey, state.version_of(skey));
    for (uint64_t i = 0; i < seq; ++i) {
        const std::string rkey = rec_key(period, participant, i);
        rw.reads.emplace_back(rkey, state.version_of(rkey));
    }
    return SimulationResult::success(std::move(rw));
}

}  // namespace

std::string micro_to_string(Micro amount) {
    const char* sign = amount < 0 ? "-" : "";
    uint64_t magnitude = amount < 0 ? uint64_t(-(amount + 1)) + 1 : uint64_t(amount);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s%llu.%06llu", sign,
                  (unsigned long long)(magnitude / kMicroPerUnit),
                  (unsigned long long)(magnitude % kMicroPerUnit));
    return buf;
}

Bytes ResourceRecord::encode() const {
    ByteWriter w;
    w.str(participant);
    w.u8(uint8_t(kind));
    w.u64(quantity);
    w.i64(unit_value);
    w.str(period);
    return w.take();
}

ResourceRecord ResourceRecord::decode(const Bytes& bytes) {
    ByteReader r(bytes);
    ResourceRecord rec;
    rec.participant = r.str();
    rec.kind = RecordKind(r.u8());
    rec.quantity = r.u64();
    rec.unit_value = r.i64();
    rec.period = r.str();
    return rec;
}

SimulationResult compensation_chaincode(const WorldState& state, const TxProposal& proposal) {
    if (proposal.function == "record") return do_record(state, proposal);
    if (proposal.function == "query_balance") return do_query_balance(state, proposal);
    return SimulationResult::failure("unknown function: " + proposal.function);
}

std::vector<ResourceRecord> collect_records(const Ledger& ledger, const std::string& period) {
    const std::string prefix = "rec/" + period + "/";
    std::vector<ResourceRecord> records;
    for (const auto& block : ledger.blocks) {
        for (size_t i = 0; i < block.txs.size(); ++i) {
            if (!block.validity[i]) continue;
            for (const auto& [key, value] : block.txs[i].rwset.writes) {
                if (key.rfind(prefix, 0) != 0) continue;
                ResourceRecord rec = ResourceRecord::decode(value);
                if (rec.period == period) records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

BalanceSheet compute_balances(const Ledger& ledger, const std::string& period) {
    return compute_balances(collect_records(ledger, period), period);
}

BalanceSheet compute_balances(const std::vector<ResourceRecord>& records,
                              const std::string& period) {
    using Wide = __int128;
    std::map<std::string, Wide> contributed;
    std::map<std::string, Wide> consumed;
    Wide total_contrib = 0;
    Wide total_consumed = 0;
    for (const auto& rec : records) {
        const Wide value = Wide(rec.quantity) * Wide(rec.unit_value);
        contributed.try_emplace(rec.participant, 0);
        consumed.try_emplace(rec.participant, 0);
        if (rec.kind == RecordKind::Contribution) {
            contributed[rec.participant] += value;
            total_contrib += value;
        } else {
            consumed[rec.participant] += value;
            total_consumed += value;
        }
    }

    BalanceSheet sheet;
    sheet.period = period;
    for (const auto& [id, _] : contributed) sheet.balances[id] = 0;
    if (total_consumed == 0) return sheet;

    // share_i = floor(C * consumed_i / V), remainder micro-units handed to
    // the largest fractional remainders (ties by id) so shares sum to C.
    std::map<std::string, Wide> share;
    Wide distributed = 0;
    std::vector<std::pair<Wide, std::string>> remainders;
    for (const auto& [id, cons] : consumed) {
        const Wide numerator = total_contrib * cons;
        share[id] = numerator / total_consumed;
        distributed += share[id];
        remainders.emplace_back(numerator % total_consumed, id);
    }
    Wide leftover = total_contrib - distributed;
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (size_t i = 0; leftover > 0; i = (i + 1) % remainders.size(), --leftover) {
        share[remainders[i].second] += 1;
    }

    for (const auto& [id, _] : contributed) {
        const Wide balance = contributed[id] - share[id];
        if (balance > Wide(INT64_MAX) || balance < Wide(INT64_MIN)) {
            throw SimError("compute_balances: balance overflows 64-bit micro-units");
        }
        sheet.balances[id] = Micro(balance);
    }
    return sheet;
}

Settlement settle(const BalanceSheet& sheet) {
    Micro sum = 0;
    for (const auto& [_, balance] : sheet.balances) sum += balance;
    if (sum != 0) throw SimError("settle: balance sheet is not zero-sum");

    struct ByAmountThenId {
        bool operator()(const std::pair<Micro, std::string>& a,
                        const std::pair<Micro, std::string>& b) const {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        }
    };
    std::set<std::pair<Micro, std::string>, ByAmountThenId> creditors;
    std::set<std::pair<Micro, std::string>, ByAmountThenId> debtors;
    for (const auto& [id, balance] : sheet.balances) {
        if (balance > 0) creditors.emplace(balance, id);
        if (balance < 0) debtors.emplace(-balance, id);
    }

    Settlement settlement;
    while (!debtors.empty()) {
        auto debtor = *debtors.begin();
        auto creditor = *creditors.begin();
        debtors.erase(debtors.begin());
        creditors.erase(creditors.begin());
        const Micro amount = std::min(debtor.first, creditor.first);
        settlement.transfers.push_back({debtor.second, creditor.second, amount});
        if (debtor.first > amount) debtors.emplace(debtor.first - amount, debtor.second);
        if (creditor.first > amount) creditors.emplace(creditor.first - amount, creditor.second);
    }
    return settlement;
}

}  // namespace meshchain
