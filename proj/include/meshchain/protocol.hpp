#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meshchain/chaincode.hpp"
#include "meshchain/kernel.hpp"
#include "meshchain/ledger.hpp"
#include "meshchain/placement.hpp"

namespace meshchain {

// Wire sizes of the protocol messages; scenario-overridable knobs, not
// measured values.
struct MessageSizes {
    uint64_t proposal_bytes = 3 * 1024;
    uint64_t response_bytes = 4 * 1024;
    uint64_t submission_bytes = 7 * 1024;
    uint64_t block_header_bytes = 1024;
    uint64_t block_per_tx_bytes = 7 * 1024;
    uint64_t notification_bytes = 512;

    uint64_t block_bytes(size_t n_txs) const {
        return block_header_bytes + block_per_tx_bytes * n_txs;
    }
    void validate() const;
    bool operator==(const MessageSizes&) const = default;
};

struct OrdererConfig {
    uint32_t block_size = 10;
    double batch_timeout = 2.0;

    void validate() const;
    bool operator==(const OrdererConfig&) const = default;
};

// Per-transaction milestone timestamps; fields stay empty until the
// flow reaches them. Timestamps are non-decreasing in field order.
struct TxRecord {
    std::string tx_id;
    double t_proposed = 0.0;
    std::optional<double> t_endorsed;
    std::optional<double> t_submitted;
    std::optional<double> t_committed;
    std::optional<double> t_notified;
    std::string outcome;  // committed-valid | committed-invalid | rejected-at-client

    bool terminal() const { return !outcome.empty(); }
};

inline constexpr const char* kOutcomeValid = "committed-valid";
inline constexpr const char* kOutcomeInvalid = "committed-invalid";
inline constexpr const char* kOutcomeRejected = "rejected-at-client";

// The role state machines (client, endorsers, ordering service,
// committers) wired onto one kernel. Message passing models only
// per-hop latency plus one bottleneck serialization term; CPU work
// queues on the owning node's FIFO processor.
class ProtocolEngine {
public:
    ProtocolEngine(SimKernel& kernel, const NetworkGraph& graph, RoleAssignment roles,
                   EndorsementPolicy policy, CpuProfile profile, MessageSizes sizes,
                   OrdererConfig orderer, const ChaincodeRegistry& registry,
                   double endorse_timeout_s = 30.0);

    // Step 1: fire a proposal from the client at the current sim time.
    void propose(TxProposal proposal);

    // Invoked once per transaction when it reaches a terminal outcome.
    void on_terminal(std::function<void(const TxRecord&)> cb) { terminal_cb_ = std::move(cb); }

    const std::vector<TxRecord>& records() const { return records_; }
    const RoleAssignment& roles() const { return roles_; }
    uint64_t blocks_cut() const { return blocks_cut_; }

    const Ledger& replica(const std::string& committer_id) const;
    const Ledger& reference_ledger() const { return replica(roles_.reference_committer); }

    // Flushes a partial pending batch immediately (end-of-run helper so
    // short workloads do not wait out the batch timeout). Normally the
    // timeout rule handles this on its own.
    void flush_pending();

private:
    struct PendingResponse {
        Endorsement endorsement;
        ReadWriteSet rwset;
        bool rejected = false;
    };
    struct ClientTx {
        TxProposal proposal;
        size_t record_index = 0;
        size_t responses_seen = 0;
        bool closed = false;  // submitted or terminal: no further collect work
        // responses grouped by digest; the first group to reach
        // required_k wins
        std::map<Digest, std::vector<Endorsement>> by_digest;
        std::map<Digest, ReadWriteSet> rwset_of;
    };
    struct CommitterState {
        Ledger ledger;
        uint64_t next_number = 0;
        bool busy = false;
        std::map<uint64_t, Block> waiting;  // out-of-order arrivals
    };

    void send(NodeIndex from, NodeIndex to, uint64_t bytes, std::function<void()> fn);
    void endorser_receive(NodeIndex endorser, const TxProposal& proposal);
    void client_receive(const std::string& tx_id, PendingResponse response);
    void client_collect(ClientTx& tx);
    void finish(size_t record_index, const std::string& outcome, std::optional<double> notified);
    void orderer_receive(Transaction tx);
    void schedule_timeout();
    void cut_block(size_t take);
    void committer_receive(const std::string& committer_id, Block block);
    void committer_drain(const std::string& committer_id);

    SimKernel& kernel_;
    const NetworkGraph& graph_;
    RoleAssignment roles_;
    EndorsementPolicy policy_;
    CpuProfile profile_;
    MessageSizes sizes_;
    OrdererConfig orderer_;
    const ChaincodeRegistry& registry_;
    double endorse_timeout_s_;

    NodeIndex client_node_;
    NodeIndex orderer_node_;
    std::vector<NodeIndex> endorser_nodes_;
    std::map<std::string, NodeIndex> committer_nodes_;

    std::map<std::pair<NodeIndex, NodeIndex>, std::vector<NodeIndex>> route_cache_;

    std::vector<TxRecord> records_;
    std::map<std::string, size_t> record_index_;
    std::map<std::string, ClientTx> open_txs_;
    std::map<std::string, std::set<std::string>> endorser_seen_;  // per endorser id

    // pending submissions ordered by (arrival time, tx_id)
    std::deque<std::pair<double, Transaction>> pending_;
    uint64_t next_block_number_ = 0;
    Digest tip_hash_;
    uint64_t blocks_cut_ = 0;

    std::map<std::string, CommitterState> committers_;
    std::function<void(const TxRecord&)> terminal_cb_;
};

}  // namespace meshchain
