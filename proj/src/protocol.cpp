#include "meshchain/protocol.hpp"

#include <algorithm>

#include "meshchain/errors.hpp"

namespace meshchain {

void MessageSizes::validate() const {
    if (proposal_bytes == 0 || response_bytes == 0 || submission_bytes == 0 ||
        block_per_tx_bytes == 0 || notification_bytes == 0) {
        throw ConfigError("message sizes: all sizes must be > 0");
    }
}

void OrdererConfig::validate() const {
    if (block_size < 1) throw ConfigError("orderer: block_size must be >= 1");
    if (batch_timeout <= 0) throw ConfigError("orderer: batch_timeout must be > 0");
}

ProtocolEngine::ProtocolEngine(SimKernel& kernel, const NetworkGraph& graph,
                               RoleAssignment roles, EndorsementPolicy policy,
                               CpuProfile profile, MessageSizes sizes, OrdererConfig orderer,
                               const ChaincodeRegistry& registry, double endorse_timeout_s)
    : kernel_(kernel),
      graph_(graph),
      roles_(std::move(roles)),
      policy_(std::move(policy)),
      profile_(profile),
      sizes_(sizes),
      orderer_(orderer),
      registry_(registry),
      endorse_timeout_s_(endorse_timeout_s),
      tip_hash_(zero_digest()) {
    roles_.validate(graph_);
    profile_.validate();
    sizes_.validate();
    orderer_.validate();
    if (endorse_timeout_s_ <= 0) throw ConfigError("protocol: endorse timeout must be > 0");
    if (policy_.required_k < 1 || size_t(policy_.required_k) > policy_.endorser_set.size()) {
        throw ConfigError("protocol: required_k out of range");
    }
    for (const auto& id : policy_.endorser_set) {
        if (!roles_.is_endorser(id)) {
            throw ConfigError("protocol: policy endorser " + id + " has no endorser role");
        }
    }

    client_node_ = graph_.require(roles_.client);
    orderer_node_ = graph_.require(roles_.orderer);
    for (const auto& id : roles_.endorsers) {
        endorser_nodes_.push_back(graph_.require(id));
        endorser_seen_[id];
    }
    for (const auto& id : roles_.committers) {
        committer_nodes_[id] = graph_.require(id);
        committers_[id];
    }
}

const Ledger& ProtocolEngine::replica(const std::string& committer_id) const {
    auto it = committers_.find(committer_id);
    if (it == committers_.end()) throw ConfigError("protocol: unknown committer " + committer_id);
    return it->second.ledger;
}

void ProtocolEngine::send(NodeIndex from, NodeIndex to, uint64_t bytes,
                          std::function<void()> fn) {
    auto key = std::pair(from, to);
    auto it = route_cache_.find(key);
    if (it == route_cache_.end()) {
        it = route_cache_.emplace(key, route(graph_, from, to)).first;
    }
    kernel_.after(transfer_time(graph_, it->second, bytes), std::move(fn));
}

void ProtocolEngine::propose(TxProposal proposal) {
    if (record_index_.count(proposal.tx_id)) {
        throw ConfigError("protocol: duplicate tx_id " + proposal.tx_id);
    }
    proposal.client_id = roles_.client;
    proposal.submit_time = kernel_.now();

    TxRecord record;
    record.tx_id = proposal.tx_id;
    record.t_proposed = kernel_.now();
    record_index_[proposal.tx_id] = records_.size();
    records_.push_back(record);

    ClientTx& tx = open_txs_[proposal.tx_id];
    tx.proposal = proposal;
    tx.record_index = record_index_[proposal.tx_id];

    const std::string tx_id = proposal.tx_id;
    kernel_.after(endorse_timeout_s_, [this, tx_id] {
        auto it = open_txs_.find(tx_id);
        if (it == open_txs_.end() || it->second.closed) return;
        it->second.closed = true;
        finish(it->second.record_index, kOutcomeRejected, kernel_.now());
    });

    for (NodeIndex endorser : endorser_nodes_) {
        send(client_node_, endorser, sizes_.proposal_bytes,
             [this, endorser, proposal] { endorser_receive(endorser, proposal); });
    }
}

void ProtocolEngine::endorser_receive(NodeIndex endorser, const TxProposal& proposal) {
    const std::string endorser_id = graph_.node(endorser).id;
    kernel_.occupy_cpu(endorser, profile_.cost_endorse, [this, endorser, endorser_id, proposal] {
        PendingResponse response;
        auto& seen = endorser_seen_[endorser_id];
        if (!seen.insert(proposal.tx_id).second) {
            response.rejected = true;
        } else {
            SimulationResult result =
                registry_.simulate(committers_.at(endorser_id).ledger.state, proposal);
            if (!result.ok()) {
                response.rejected = true;
            } else {
                response.rwset = std::move(*result.rwset);
                response.endorsement = {endorser_id, rwset_digest(response.rwset)};
            }
        }
        const std::string tx_id = proposal.tx_id;
        send(endorser, client_node_, sizes_.response_bytes,
             [this, tx_id, response = std::move(response)] { client_receive(tx_id, response); });
    });
}

void ProtocolEngine::client_receive(const std::string& tx_id, PendingResponse response) {
    kernel_.occupy_cpu(client_node_, profile_.cost_client_per_response,
                       [this, tx_id, response = std::move(response)] {
                           auto it = open_txs_.find(tx_id);
                           if (it == open_txs_.end()) return;
                           ClientTx& tx = it->second;
                           tx.responses_seen += 1;
                           if (!response.rejected) {
                               const Digest d = response.endorsement.response_digest;
                               tx.by_digest[d].push_back(response.endorsement);
                               tx.rwset_of.emplace(d, response.rwset);
                           }
                           if (!tx.closed) client_collect(tx);
                       });
}

void ProtocolEngine::client_collect(ClientTx& tx) {
    for (const auto& [digest, endorsements] : tx.by_digest) {
        if (!evaluate_policy(policy_, endorsements)) continue;

        TxRecord& record = records_[tx.record_index];
        record.t_endorsed = kernel_.now();
        tx.closed = true;

        const ReadWriteSet& rwset = tx.rwset_of.at(digest);
        if (rwset.writes.empty()) {
            // Query: completes locally, nothing reaches the orderer.
            finish(tx.record_index, kOutcomeValid, std::nullopt);
            return;
        }
        Transaction assembled{tx.proposal, rwset, endorsements};
        send(client_node_, orderer_node_, sizes_.submission_bytes,
             [this, assembled = std::move(assembled)]() mutable {
                 orderer_receive(std::move(assembled));
             });
        return;
    }
    if (tx.responses_seen == endorser_nodes_.size()) {
        tx.closed = true;
        finish(tx.record_index, kOutcomeRejected, kernel_.now());
    }
}

void ProtocolEngine::finish(size_t record_index, const std::string& outcome,
                            std::optional<double> notified) {
    TxRecord& record = records_[record_index];
    record.outcome = outcome;
    record.t_notified = notified;
    if (terminal_cb_) terminal_cb_(record);
}

void ProtocolEngine::orderer_receive(Transaction tx) {
    const double now = kernel_.now();
    records_[record_index_.at(tx.proposal.tx_id)].t_submitted = now;
    // Ordering cost is paid per transaction as load on the orderer's
    // CPU; batching itself is bookkeeping.
    kernel_.occupy_cpu(orderer_node_, profile_.cost_order_per_tx);

    const bool was_empty = pending_.empty();
    auto key = std::pair(now, tx.proposal.tx_id);
    auto at = std::upper_bound(pending_.begin(), pending_.end(), key,
                               [](const auto& k, const auto& entry) {
                                   return k < std::pair(entry.first, entry.second.proposal.tx_id);
                               });
    pending_.insert(at, {now, std::move(tx)});

    if (pending_.size() >= orderer_.block_size) {
        cut_block(orderer_.block_size);
    } else if (was_empty) {
        schedule_timeout();
    }
}

void ProtocolEngine::schedule_timeout() {
    if (pending_.empty()) return;
    auto key = std::pair(pending_.front().first, pending_.front().second.proposal.tx_id);
    const double fire_at = std::max(kernel_.now(), key.first + orderer_.batch_timeout);
    kernel_.schedule(fire_at, [this, key] {
        if (pending_.empty()) return;
        if (std::pair(pending_.front().first, pending_.front().second.proposal.tx_id) != key) {
            return;  // stale timer: that batch was already cut
        }
        cut_block(std::min<size_t>(pending_.size(), orderer_.block_size));
    });
}

void ProtocolEngine::cut_block(size_t take) {
    std::vector<Transaction> txs;
    txs.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        txs.push_back(std::move(pending_.front().second));
        pending_.pop_front();
    }
    Block block = make_block(next_block_number_++, tip_hash_, std::move(txs));
    tip_hash_ = block.block_hash;
    blocks_cut_ += 1;

    const uint64_t bytes = sizes_.block_bytes(block.txs.size());
    for (const auto& [committer_id, node] : committer_nodes_) {
        send(orderer_node_, node, bytes,
             [this, committer_id, block] { committer_receive(committer_id, block); });
    }
    if (!pending_.empty()) schedule_timeout();
}

void ProtocolEngine::committer_receive(const std::string& committer_id, Block block) {
    CommitterState& state = committers_.at(committer_id);
    state.waiting.emplace(block.number, std::move(block));
    committer_drain(committer_id);
}

void ProtocolEngine::committer_drain(const std::string& committer_id) {
    CommitterState& state = committers_.at(committer_id);
    if (state.busy) return;
    auto it = state.waiting.find(state.next_number);
    if (it == state.waiting.end()) return;

    Block block = std::move(it->second);
    state.waiting.erase(it);
    state.busy = true;

    const double duration = profile_.cost_validate_per_tx * double(block.txs.size());
    const NodeIndex node = committer_nodes_.at(committer_id);
    kernel_.occupy_cpu(node, duration, [this, committer_id, block = std::move(block)]() mutable {
        CommitterState& state = committers_.at(committer_id);
        block.validity = mvcc_validate(state.ledger.state, block, policy_);
        const Block& committed = block;
        const bool is_reference = committer_id == roles_.reference_committer;
        if (is_reference) {
            for (size_t i = 0; i < committed.txs.size(); ++i) {
                const std::string& tx_id = committed.txs[i].proposal.tx_id;
                TxRecord& record = records_[record_index_.at(tx_id)];
                record.t_committed = kernel_.now();
                const std::string outcome =
                    committed.validity[i] ? kOutcomeValid : kOutcomeInvalid;
                const size_t record_idx = record_index_.at(tx_id);
                send(committer_nodes_.at(committer_id), client_node_, sizes_.notification_bytes,
                     [this, record_idx, outcome] {
                         finish(record_idx, outcome, kernel_.now());
                     });
            }
        }
        commit_block(state.ledger, std::move(block));
        state.next_number += 1;
        state.busy = false;
        committer_drain(committer_id);
    });
}

void ProtocolEngine::flush_pending() {
    while (!pending_.empty()) {
        cut_block(std::min<size_t>(pending_.size(), orderer_.block_size));
    }
}

}  // namespace meshchain
